#pragma once

#include <map>
#include <string>
#include <vector>

#include "specmorph/diffop.hpp"

namespace specmorph {

// Shared symbols; every module uses the same instances so substitution and
// binding keys agree. `pi` is a reserved parameter bound to its numeric value
// by standard_bindings.
namespace syms {
const Symbol& x();
const Symbol& r();
const Symbol& theta();
const Symbol& phi();
const Symbol& psi();
const Symbol& a();
const Symbol& hbar();
const Symbol& mu();
const Symbol& A();
const Symbol& B();
const Symbol& E();
const Symbol& omega();
const Symbol& pi();
}  // namespace syms

struct PhysConsts {
  double hbar = 1.0, mu = 1.0, a = 1.0;
};

Expr::Bindings standard_bindings(const PhysConsts& consts);

enum class EndpointType { regular, singular, infinite };

struct Endpoint {
  EndpointType type = EndpointType::infinite;
  Expr where = Expr(0);  // ignored for infinite endpoints; may involve a, pi
  double value(const PhysConsts& consts) const;
};

struct ParamSpec {
  Symbol sym;
  double min = -1e300, max = 1e300;  // admissible closed range
  std::string note;
};

struct PotentialSpec {
  std::string id;
  std::vector<std::string> aliases;
  Symbol var;
  Endpoint lo, hi;
  Expr potential;  // Expr in var and parameter symbols
  std::vector<ParamSpec> params;
  bool has_closed_form = false;
  bool stub = false;  // shipped without verified transformation data
  std::string notes;
};

struct Level {
  std::map<std::string, double> quantum_numbers;
  double energy;
};

struct SpectrumResult {
  std::vector<Level> levels;  // ascending energy
  PhysConsts consts;
  std::string truncation_note;
  std::string convention_note;
};

class Catalog {
 public:
  Catalog();
  const PotentialSpec& get(const std::string& id_or_alias) const;  // NotFound
  const std::vector<PotentialSpec>& entries() const { return entries_; }

 private:
  std::vector<PotentialSpec> entries_;
};

const Catalog& catalog();

// (1/2mu) p^2 + V - E over the spec's variable; params may be symbolic.
DiffOp build_schrodinger_op(const PotentialSpec& spec,
                            const std::map<Symbol, Expr>& params,
                            const Expr& energy);

// Closed-form bound-state spectrum where the catalog provides one.
// Errors: NoClosedForm, NoBoundStates, ParameterOutOfRange.
SpectrumResult closed_form_spectrum(const PotentialSpec& spec,
                                    const std::map<Symbol, double>& params,
                                    const PhysConsts& consts, int count);

// Bound-state count helpers used by the spectra.
// Poschl-Teller coupling inversion gamma(gamma-1) = 2 mu A / (a hbar)^2,
// principal branch gamma > 1/2.
double pt_gamma_from_coupling(double A, const PhysConsts& consts);

}  // namespace specmorph
