#include "csma/error.hpp"

namespace csma {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_graph: return "invalid-graph";
    case Errc::state_space_too_large: return "state-space-too-large";
    case Errc::invalid_schedule: return "invalid-schedule";
    case Errc::invalid_weight: return "invalid-weight";
    case Errc::invalid_delta: return "invalid-delta";
    case Errc::invalid_feedback: return "invalid-feedback";
    case Errc::invalid_rate: return "invalid-rate";
    case Errc::not_irreducible: return "not-irreducible";
    case Errc::invalid_adjoint_base: return "invalid-adjoint-base";
    case Errc::numerical_failure: return "numerical-failure";
    case Errc::conductance_too_large: return "conductance-too-large";
    case Errc::tree_too_large: return "tree-too-large";
    case Errc::not_contracting: return "not-contracting";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::invariant_violation: return "invariant-violation";
    case Errc::invalid_config: return "invalid-config";
    case Errc::io_error: return "io-error";
    }
    return "unknown";
}

} // namespace csma
