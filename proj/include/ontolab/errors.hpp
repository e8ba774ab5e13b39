#pragma once

#include <stdexcept>
#include <string>

namespace ontolab {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ONTOLAB_DEFINE_ERROR(Name)                                            \
    struct Name : Error {                                                     \
        using Error::Error;                                                   \
    }

// dist_core
ONTOLAB_DEFINE_ERROR(NotNormalized);
ONTOLAB_DEFINE_ERROR(NegativeEntry);
ONTOLAB_DEFINE_ERROR(UnknownVariable);
ONTOLAB_DEFINE_ERROR(ZeroProbabilityEvent);
ONTOLAB_DEFINE_ERROR(CyclicFactorization);
ONTOLAB_DEFINE_ERROR(MissingVariable);
ONTOLAB_DEFINE_ERROR(DuplicateTarget);
ONTOLAB_DEFINE_ERROR(AliasViolation);
ONTOLAB_DEFINE_ERROR(CapExceeded);

// model gallery
ONTOLAB_DEFINE_ERROR(InvalidProbability);
ONTOLAB_DEFINE_ERROR(InconsistentSpec);
ONTOLAB_DEFINE_ERROR(NotNormalizedState);
ONTOLAB_DEFINE_ERROR(NotUnitSetting);
ONTOLAB_DEFINE_ERROR(ShapeMismatch);

// theorem lab
ONTOLAB_DEFINE_ERROR(InvalidBudget);

// document / CLI layer
ONTOLAB_DEFINE_ERROR(SyntaxError);
ONTOLAB_DEFINE_ERROR(SchemaError);
ONTOLAB_DEFINE_ERROR(ReferenceError);
ONTOLAB_DEFINE_ERROR(UsageError);

#undef ONTOLAB_DEFINE_ERROR

} // namespace ontolab
