#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace csma {

enum class Errc {
    invalid_argument,
    invalid_graph,
    state_space_too_large,
    invalid_schedule,
    invalid_weight,
    invalid_delta,
    invalid_feedback,
    invalid_rate,
    not_irreducible,
    invalid_adjoint_base,
    numerical_failure,
    conductance_too_large,
    tree_too_large,
    not_contracting,
    insufficient_data,
    invariant_violation,
    invalid_config,
    io_error,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(what), m_code(code) {}

    Errc code() const noexcept { return m_code; }

  private:
    Errc m_code;
};

[[noreturn]] inline void fail(Errc code, const std::string &what) {
    throw Error(code, what);
}

} // namespace csma
