#include "entlab/rational.hpp"

#include <cctype>
#include <cmath>

#include "entlab/error.hpp"

namespace entlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::ZeroMassCondition: return "ZeroMassCondition";
    case ErrorKind::ZMarginalMismatch: return "ZMarginalMismatch";
    case ErrorKind::BadWeights: return "BadWeights";
    case ErrorKind::CapOutOfRange: return "CapOutOfRange";
    case ErrorKind::NonBooleanClass: return "NonBooleanClass";
    case ErrorKind::NonClosedClass: return "NonClosedClass";
    case ErrorKind::LPBudgetExceeded: return "LPBudgetExceeded";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::InfeasibleWitness: return "InfeasibleWitness";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::HypothesisNotViolated: return "HypothesisNotViolated";
    case ErrorKind::LTooLarge: return "LTooLarge";
    case ErrorKind::NoThreshold: return "NoThreshold";
    case ErrorKind::UnknownSuite: return "UnknownSuite";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Error";
}

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  const auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
  if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+') {
    throw Error(ErrorKind::ParseError, "not a rational literal: '" + std::string(text) + "'");
  }
  mpz_class n(std::string(num[0] == '+' ? num.substr(1) : num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(10); }

double to_double(const Rational& r) { return r.get_d(); }

Rational pow(const Rational& base, unsigned long exponent) {
  Rational result;
  mpz_pow_ui(result.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(result.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  result.canonicalize();
  return result;
}

Rational pow2(long e) {
  Rational r(1);
  if (e >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return r;
}

double neg_log2(const Rational& r) {
  // Split into numerator/denominator logs so tiny values do not underflow.
  long num_exp = 0;
  long den_exp = 0;
  const double num = mpz_get_d_2exp(&num_exp, r.get_num_mpz_t());
  const double den = mpz_get_d_2exp(&den_exp, r.get_den_mpz_t());
  return -(std::log2(num) + static_cast<double>(num_exp) - std::log2(den) - static_cast<double>(den_exp));
}

Rational sum(std::span<const Rational> values) {
  Rational total(0);
  for (const auto& v : values) total += v;
  return total;
}

std::uint64_t ceil_to_u64(const Rational& r) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  if (c < 0) return 0;
  return c.get_ui();
}

bool exact_sqrt(const Rational& r, Rational& out) {
  if (r < 0) return false;
  if (!mpz_perfect_square_p(r.get_num_mpz_t()) || !mpz_perfect_square_p(r.get_den_mpz_t())) return false;
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), r.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), r.get_den_mpz_t());
  out = Rational(n, d);
  out.canonicalize();
  return true;
}

}  // namespace entlab
