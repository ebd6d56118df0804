#pragma once

#include <stdexcept>
#include <string>

namespace tropmat {

// Failure kinds, split by how the CLI maps them to exit codes:
// validation errors (bad input, violated preconditions) vs mathematical
// failure states reached with well-formed input.
enum class errc {
  // validation
  axiom_violation,
  empty_ground_set,
  out_of_range,
  loopy_matroid,
  grade_out_of_range,
  matroid_mismatch,
  wrong_grade,
  ambient_mismatch,
  not_a_facet,
  dimension_mismatch,
  not_a_subdivision,
  unbalanced_directions,
  infeasible_type,
  bad_input,
  // mathematical failure states
  genericity_failure,
  empty_solution,
  unbalanced_result,
  non_injective_embedding,
  projection_mismatch,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::axiom_violation: return "AxiomViolation";
    case errc::empty_ground_set: return "EmptyGroundSet";
    case errc::out_of_range: return "OutOfRange";
    case errc::loopy_matroid: return "LoopyMatroid";
    case errc::grade_out_of_range: return "GradeOutOfRange";
    case errc::matroid_mismatch: return "MatroidMismatch";
    case errc::wrong_grade: return "WrongGrade";
    case errc::ambient_mismatch: return "AmbientMismatch";
    case errc::not_a_facet: return "NotAFacet";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::not_a_subdivision: return "NotASubdivision";
    case errc::unbalanced_directions: return "UnbalancedDirections";
    case errc::infeasible_type: return "InfeasibleType";
    case errc::bad_input: return "BadInput";
    case errc::genericity_failure: return "GenericityFailure";
    case errc::empty_solution: return "EmptySolution";
    case errc::unbalanced_result: return "UnbalancedResult";
    case errc::non_injective_embedding: return "NonInjectiveEmbedding";
    case errc::projection_mismatch: return "ProjectionMismatch";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

  // Math failure states are reachable on valid input; everything else is
  // input/precondition validation.
  bool is_math_failure() const {
    switch (code_) {
      case errc::genericity_failure:
      case errc::empty_solution:
      case errc::unbalanced_result:
      case errc::non_injective_embedding:
      case errc::projection_mismatch: return true;
      default: return false;
    }
  }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void check(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace tropmat
