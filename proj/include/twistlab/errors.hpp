#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace twistlab {

// Stable machine-readable codes; the CLI surfaces them in its error envelope.
enum class ErrorCode {
  BadInput,            // unparseable label / file / argument
  BadPrime,            // argument required to be an odd prime (or good prime) is not
  SingularCurve,       // discriminant vanishes
  NonMinimalModel,     // model detectably non-minimal at an odd prime
  AdditivePrime,       // additive reduction where multiplicative is required
  NonSquarefree,       // twisting integer (or conductor) not squarefree
  HypothesisViolated,  // some other stated precondition fails
  MissingInvariant,    // mu2/lambda2 needed but not supplied by any source
  PoolExhausted,       // not enough qualifying primes below the search bound
  NotFound,            // label has no fixture/cache entry and remote is off
  NetworkError,        // remote fetch failed after retries
  CacheCorrupt,        // cache entry fails checksum or schema validation
  InsufficientData,    // too few sample points for a fit
  ResourceLimit,       // request exceeds a configured bound
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string clause = {})
      : std::runtime_error(message), code_(code), clause_(std::move(clause)) {}

  ErrorCode code() const { return code_; }
  // The violated precondition, spelled as a predicate, e.g. "gcd(d, 2*N_E) = 1".
  const std::string& clause() const { return clause_; }

 private:
  ErrorCode code_;
  std::string clause_;
};

}  // namespace twistlab
