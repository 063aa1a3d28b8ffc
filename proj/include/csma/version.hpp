#pragma once

#define CSMA_VERSION_STRING "0.1.0"
