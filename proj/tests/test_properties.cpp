#include <gtest/gtest.h>

#include "property_suites.hpp"

namespace {

void expect_suite(const props::SuiteResult& r) {
  EXPECT_GE(r.cases, props::kCases) << r.name;
  EXPECT_EQ(r.failures, 0) << r.name << ": " << r.first_failure;
}

TEST(Properties, DynamicListSortedness) { expect_suite(props::dynamic_list_sortedness()); }
TEST(Properties, PsmBufferConservation) { expect_suite(props::psm_buffer_conservation()); }
TEST(Properties, MobilityContainment) { expect_suite(props::mobility_containment()); }
TEST(Properties, TransitionTotality) { expect_suite(props::fsm_totality()); }
TEST(Properties, SelectionFeasibility) { expect_suite(props::selection_feasibility()); }
TEST(Properties, PropagationLaws) { expect_suite(props::propagation_laws()); }
TEST(Properties, EngineConservation) { expect_suite(props::engine_conservation()); }
TEST(Properties, EngineDeterminism) { expect_suite(props::engine_determinism()); }

}  // namespace
