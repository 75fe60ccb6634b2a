#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "semicomp/characteristics.hpp"
#include "semicomp/generator.hpp"
#include "semicomp/payoff.hpp"
#include "semicomp/propagation.hpp"

namespace semicomp {

// Comparison theorems.  "emm" variants compare martingales, "p" variants
// compare under the physical measure with increasing test functions.
// Direction convention everywhere: "ordered" asserts E f(Y_T) <= E f(X_T).
enum class TheoremId { dcx_emm, cx_emm, general_emm, girsanov_emm, idcx_p, icx_p, general_p };

const char* theorem_name(TheoremId id);
TheoremId theorem_from_string(const std::string& s);
bool theorem_under_emm(TheoremId id);
bool theorem_increasing(TheoremId id);  // increasing test-function class

enum class OrderStatus { equal, ordered, reversed, incomparable };
const char* order_status_name(OrderStatus s);
OrderStatus meet(OrderStatus a, OrderStatus b);

// --- symmetric eigenvalues (cyclic Jacobi) ---------------------------------
std::vector<double> sym_eigenvalues(std::vector<double> a, std::size_t d);
// B vs A in the Loewner order: "ordered" means B <= A (A - B psd).
OrderStatus loewner_compare(const std::vector<double>& a, const std::vector<double>& b,
                            std::size_t d, double tol);

// --- kernel comparisons ------------------------------------------------------
struct KernelOrderReport {
    OrderStatus status = OrderStatus::equal;
    double max_up = 0.0;    // largest scaled excess of Y over X
    double max_down = 0.0;  // largest scaled excess of X over Y
    std::size_t tests = 0;
};

// Integral order of the Lebesgue kernel parts against a hinge/quadratic test
// family (increasing_only restricts to the increasing-convex family).
KernelOrderReport compare_kernels(const JumpKernel& kx, const JumpKernel& ky,
                                  bool increasing_only);
// Pointwise density order (the measure-change criterion); requires compatible
// representations.
OrderStatus compare_kernels_pointwise(const JumpKernel& kx, const JumpKernel& ky);

// Atom increment order at a shared atom time (convex / increasing-convex order
// of the full atom increment distribution).
KernelOrderReport compare_atom_increments(const DiffChar& chx, const DiffChar& chy, double s,
                                          bool increasing_only);

// --- structural criterion (vi) ----------------------------------------------
struct StructuralComparison {
    OrderStatus drift = OrderStatus::equal;  // P theorems only
    OrderStatus diffusion = OrderStatus::equal;
    OrderStatus kernel = OrderStatus::equal;
    OrderStatus atoms = OrderStatus::equal;
    OrderStatus combined = OrderStatus::equal;
    std::string detail;
};

StructuralComparison compare_structure(const ProcessModel& x, const ProcessModel& y,
                                       TheoremId thm);

// --- key inequality and the linking scan --------------------------------------
// 0.5 (cY - cX) gxx + int H dK_Y - int H dK_X (+ (bY - bX) gx under P),
// evaluated on X's field.
double key_inequality(const PropagationField& fx, const DiffChar& chx, const DiffChar& chy,
                      const JumpIntegrator& jix, const JumpIntegrator& jiy, std::size_t slice,
                      double xq, bool include_drift);

struct LinkingScan {
    std::size_t points = 0;
    std::size_t resolved = 0;    // points whose local term scale is meaningful
    std::size_t violations = 0;  // resolved points with a positive excess
    double fraction = 0.0;       // violations / resolved
    double max_violation = 0.0;  // largest positive value, in local-scale units
    double tol = 1e-9;
};

LinkingScan linking_drift_scan(const PropagationField& fx, const ProcessModel& x,
                               const ProcessModel& y, TheoremId thm, double tol_ord = 1e-9);

// --- hypothesis checklist -----------------------------------------------------
enum class CheckStatus { ok, assumed, failed, skipped };
const char* check_status_name(CheckStatus s);

struct CheckItem {
    std::string name;
    CheckStatus status = CheckStatus::skipped;
    std::string detail;
};

struct HypothesisReport {
    std::vector<CheckItem> items;
    bool acceptable() const;  // no failed items
    bool any_assumed() const;
};

struct OrderingAssumptions {
    bool support_inclusion = false;      // asserted by the scenario
    bool dominated_convergence = false;  // asserted by the scenario
};

HypothesisReport check_theorem_hypotheses(const ProcessModel& x, const ProcessModel& y,
                                          TheoremId thm, const PropagationField* field_x,
                                          const ResidualScan* scan_x,
                                          const OrderingAssumptions& assume);

// Terminal test functions used for Monte Carlo comparisons of the pair.
std::vector<Payoff> test_function_family(const ProcessModel& x, const ProcessModel& y,
                                         TheoremId thm);

} // namespace semicomp
