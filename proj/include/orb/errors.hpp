#pragma once

#include <stdexcept>
#include <string>

namespace orb {

struct IndeterminateValuation : std::runtime_error {
    explicit IndeterminateValuation(const std::string& m) : std::runtime_error(m) {}
};

struct NotInvertible : std::runtime_error {
    explicit NotInvertible(const std::string& m) : std::runtime_error(m) {}
};

struct PositiveValuationRequired : std::runtime_error {
    explicit PositiveValuationRequired(const std::string& m) : std::runtime_error(m) {}
};

using NotUnit = NotInvertible;

struct DivergentSubstitution : std::runtime_error {
    explicit DivergentSubstitution(const std::string& m) : std::runtime_error(m) {}
};

struct CapViolation : std::runtime_error {
    explicit CapViolation(const std::string& m) : std::runtime_error(m) {}
};

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& m) : std::runtime_error(m) {}
};

struct LeadingTermMismatch : std::runtime_error {
    explicit LeadingTermMismatch(const std::string& m) : std::runtime_error(m) {}
};

struct AreaRelationViolation : std::runtime_error {
    explicit AreaRelationViolation(const std::string& m) : std::runtime_error(m) {}
};

struct MissingAreaLedger : std::runtime_error {
    explicit MissingAreaLedger(const std::string& m) : std::runtime_error(m) {}
};

struct InvalidLambda : std::runtime_error {
    explicit InvalidLambda(const std::string& m) : std::runtime_error(m) {}
};

struct HenselConditionFailed : std::runtime_error {
    explicit HenselConditionFailed(const std::string& m) : std::runtime_error(m) {}
};

struct PrecisionExhausted : std::runtime_error {
    explicit PrecisionExhausted(const std::string& m) : std::runtime_error(m) {}
};

struct HypothesisViolated : std::runtime_error {
    explicit HypothesisViolated(const std::string& m) : std::runtime_error(m) {}
};

struct PolygonDegenerate : std::runtime_error {
    explicit PolygonDegenerate(const std::string& m) : std::runtime_error(m) {}
};

struct IndependenceUncertified : std::runtime_error {
    explicit IndependenceUncertified(const std::string& m) : std::runtime_error(m) {}
};

struct ReductionStalled : std::runtime_error {
    explicit ReductionStalled(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace orb
