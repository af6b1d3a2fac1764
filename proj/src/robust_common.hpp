#pragma once

// Internal machinery shared by the state-data and input-output robust
// verifiers: both assemble the same kind of SDP around a quadratic
// consistency set and differ only in the outer-factor rows.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ddv/data.hpp"
#include "ddv/verify_state.hpp"

namespace ddv::detail {

using Assembler = std::function<SdpProblem(const InverseSupplyParam&)>;

Matrix sym(const Matrix& M);
Matrix inverse_supply_full(const InverseSupplyRate& r);
int packed_count(int n);
Verdict undecided(const MarginReport& mr, std::string note);

// Fixed-supply robust test: feasible => Dissipative with (P, tau)
// certificate, otherwise Unknown (the underlying condition is sufficient
// only). `note` is prepended to the verdict notes.
Verdict verify_fixed_generic(const Assembler& assemble, int pdim,
                             const InverseSupplyRate& inv, std::string note,
                             const VerifyConfig& cfg);

// Scalar-parameter optimizer: path-following on the affine problem, then
// monotone fixed-scalar bisection to refine a stalled result or rescue a
// lost one.
Verdict optimize_scalar_generic(const Assembler& assemble, int pdim,
                                const InverseSupplyParam& par,
                                const VerifyConfig& cfg, bool is_gain);

// Draws `count` members of `set` starting from the asserted-member center
// J0. Odd draws re-fit through noise realizations admitted by nb; the rest
// walk random rays from the center toward the boundary. `refit` maps an
// admitted noise matrix (width x span) to a candidate member.
std::vector<Matrix> sample_set_members(
    const QuadraticMatrixSet& set, const Matrix& J0,
    const NoiseBoundQuadratic& nb,
    const std::function<Matrix(const Matrix&)>& refit, int count,
    std::uint64_t seed, const char* where);

}  // namespace ddv::detail
