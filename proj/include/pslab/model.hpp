#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pslab/types.hpp"

namespace pslab {

enum class ModelKind {
  airy,
  cubic,
  rotated_ho,
  shifted_ho,
  swanson,
  advection_diffusion,
  perturbed_ho,
  custom,
};

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

// Polynomial in x with complex coefficients, ascending powers.
struct Poly {
  std::vector<cplx> c;
  cplx eval(cplx x) const;
  Poly derivative() const;
  int degree() const { return c.empty() ? 0 : int(c.size()) - 1; }
};

// One coefficient function a_j(x). Catalog models carry closed-form
// derivatives; custom callables fall back to central differences with step
// 1e-6 * max(1, |x|).
class Coefficient {
 public:
  static Coefficient polynomial(Poly p);
  static Coefficient analytic(std::function<cplx(cplx)> f, std::function<cplx(cplx)> df = nullptr);

  cplx operator()(cplx x) const;
  cplx deriv(cplx x) const;
  bool is_polynomial() const { return poly_.has_value(); }
  const Poly* poly() const { return poly_ ? &*poly_ : nullptr; }

 private:
  std::optional<Poly> poly_;
  std::function<cplx(cplx)> f_;
  std::function<cplx(cplx)> df_;
};

// Dilation law: (U psi)(x) = tau^{1/2} psi(tau x) maps the operator to
// tau^p * H_h with h = tau^{-s}.
struct ScalingLaw {
  double s = 2.0;
  int p = 2;
};

// Present when the model reads prefactor * (-d^2/dx^2 + V) after factoring the
// leading scalar; V is evaluable at complex arguments for the catalog.
struct PotentialForm {
  std::function<cplx(cplx)> V;
  std::function<cplx(cplx)> dV;
  cplx prefactor = 1.0;
  std::string reduction_note;
};

struct OperatorModel {
  ModelKind kind = ModelKind::custom;
  std::map<std::string, double> params;
  std::vector<Coefficient> coeffs;  // a_0 .. a_n
  ScalingLaw scaling;
  std::optional<PotentialForm> potential;
  std::string notes;

  int order() const { return int(coeffs.size()) - 1; }
  bool polynomial_coefficients() const;

  nlohmann::json to_json() const;
  static OperatorModel from_json(const nlohmann::json& j);
};

struct SymbolPoint {
  double x = 0.0;
  double xi = 0.0;
  cplx value;      // f(x, xi) = sum a_j(x) (-i xi)^j
  double bracket;  // (1/2i){f, fbar}(x, xi)
};

OperatorModel make_model(ModelKind kind, const std::map<std::string, double>& params);
OperatorModel make_custom_model(std::vector<Coefficient> coeffs, ScalingLaw scaling = {},
                                std::optional<PotentialForm> potential = std::nullopt);

SymbolPoint symbol_eval(const OperatorModel& m, double x, double xi);

// Real phase-space point with f(x0, xi0) = z and positive bracket, or nullopt
// when z is outside the closure of the bracket-positive symbol range.
// Tie-break between admissible centers: smallest |x0|, then positive sign.
std::optional<std::pair<double, double>> semiclassical_witness(const OperatorModel& m, cplx z);

struct Rescaled {
  double h;
  double prefactor;
};
Rescaled semiclassical_rescale(const OperatorModel& m, double tau);

// Reduced normal-form target for Schroedinger-form models: z / prefactor.
cplx reduced_target(const OperatorModel& m, cplx z);

}  // namespace pslab
