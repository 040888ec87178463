// Honest vs intercepted key exchange: where the two A-C behaviours sit, how
// far each is from the uncorrelated manifold, and whether noisy observations
// of them can be told apart.

#include <cstdio>

#include "p3net/p3net.hpp"

using namespace p3net;

namespace {

void print_point(const char* label, const BehaviourPoint& p) {
    std::printf("%-12s", label);
    for (double x : p.coords()) std::printf(" %.4f", x);
    std::printf("\n");
}

} // namespace

int main() {
    const double noise = 0.05;
    const std::uint64_t seed = 42;

    const auto honest = qkd_scenario(ScenarioKind::Honest, 0.0);
    const auto intercepted = qkd_scenario(ScenarioKind::Intercepted, 0.0);
    const auto pb = collapse(behaviour_from_state(honest.state, honest.measurements, honest.shape));
    const auto pu = collapse(behaviour_from_state(intercepted.state, intercepted.measurements, intercepted.shape));

    print_point("honest", pb);
    print_point("intercepted", pu);
    std::printf("distance between them: %.6f\n\n", euclidean_distance(pb, pu));

    const auto proj = project(pb);
    std::printf("honest point projects to singles %.6f, squared distance %.6f\n", proj.params.a0,
                proj.squared_distance);
    std::printf("intercepted point lies on the manifold: %s\n\n", on_manifold(pu, 1e-12) ? "yes" : "no");

    const double sd = distance_sigma(pu, noise);
    for (std::uint64_t k = 0; k < 3; ++k) {
        const auto obs_b = perturb(pb, {noise, seed + k, NoiseMode::Relative});
        const auto obs_u = perturb(pu, {noise, seed + 100 + k, NoiseMode::Relative});
        const auto rb = gaussian_separability(pu, obs_b, sd, 0.01);
        const auto ru = gaussian_separability(pu, obs_u, sd, 0.01);
        std::printf("trial %llu: honest obs z=%.2f p=%.2e reject=%d | intercepted obs z=%.2f p=%.3f reject=%d\n",
                    static_cast<unsigned long long>(k), rb.z, rb.p_value, rb.reject, ru.z, ru.p_value, ru.reject);
    }

    const auto bound = behaviour_bound_check(honest.state, intercepted.state, honest.measurements, honest.shape);
    std::printf("\n||V||_2=%.4f <= ||V||_1=%.4f <= %.4f : %s\n", bound.l2, bound.l1, bound.rhs,
                bound.holds ? "holds" : "violated");
    return 0;
}
