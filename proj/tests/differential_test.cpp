#include <ostream>

#include <gtest/gtest.h>

#include "random_instance.hpp"

using namespace abr;

namespace abr {
void PrintTo(PlanClass c, std::ostream* os) { *os << to_string(c); }
}  // namespace abr
using abr::testing::InstanceGenerator;

class Differential : public ::testing::TestWithParam<PlanClass> {};

TEST_P(Differential, BackendsAgree) {
    InstanceGenerator gen(1000 + static_cast<std::uint64_t>(GetParam()));
    for (int i = 0; i < 150; ++i) {
        const auto inst = gen.next(GetParam());
        const auto outcome = abr::testing::run_differential(inst);
        ASSERT_TRUE(outcome.agree) << "instance " << i << " " << inst.description << "\n" << outcome.detail;
    }
}

INSTANTIATE_TEST_SUITE_P(AllClasses, Differential,
                         ::testing::Values(PlanClass::Filter, PlanClass::Join, PlanClass::GroupBy,
                                           PlanClass::JoinGroupByTopK),
                         [](const auto& info) { return std::string(to_string(info.param)); });
