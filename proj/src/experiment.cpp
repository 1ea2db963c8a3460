#include "ddc/experiment.hpp"

#include <cmath>

#include "ddc/errors.hpp"
#include "ddc/numerics.hpp"

namespace ddc {

namespace {

constexpr double kBlowUpGuard = 1e12;

// Deterministic 64-bit generator (splitmix64). Kept self-contained so the
// byte streams backing seeded experiments never depend on the standard
// library's distribution internals.
class SeededUniform {
public:
    explicit SeededUniform(unsigned long long seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}

    double next_unit() { // in [0, 1)
        unsigned long long z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) / 9007199254740992.0;
    }

    double next_symmetric(double amplitude) { return (2.0 * next_unit() - 1.0) * amplitude; }

private:
    unsigned long long state_;
};

} // namespace

std::size_t min_samples_required(std::size_t input_dim, std::size_t phi_dim,
                                 std::size_t state_dim) {
    return (input_dim + phi_dim) * (state_dim + 1) + state_dim;
}

Matrix generate_excitation(const ExcitationPlan& plan, std::size_t input_dim) {
    if (plan.samples == 0)
        throw InvalidParameter("excitation plan needs at least one sample");
    SeededUniform rng(plan.seed);
    Matrix u(input_dim, plan.samples);
    for (std::size_t i = 0; i < input_dim; ++i)
        for (std::size_t k = 0; k < plan.samples; ++k)
            u(i, k) = rng.next_symmetric(plan.amplitude);
    return u;
}

std::vector<SubsystemData> collect(const PlantModel& plant, const std::vector<Matrix>& inputs,
                                   const std::vector<double>& x_init, std::size_t samples) {
    if (plant.mode != PlantMode::discrete)
        throw InvalidParameter("collect expects a discrete model");
    if (inputs.size() != plant.subsystem_count())
        throw InvalidParameter("collect needs one input matrix per subsystem");
    if (x_init.size() != plant.total_state_dim())
        throw InvalidParameter("collect initial state dimension mismatch");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].rows() != plant.subsystems[i].input_dim())
            throw InvalidParameter("collect input row count mismatch");
        if (inputs[i].cols() < samples)
            throw InvalidParameter("collect input has fewer columns than requested samples");
    }

    const std::size_t count = plant.subsystem_count();
    std::vector<SubsystemData> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& sub = plant.subsystems[i];
        data[i].u = Matrix(sub.input_dim(), samples);
        data[i].phi = Matrix(sub.phi_dim(), samples);
        data[i].x0 = Matrix(sub.state_dim(), samples);
        data[i].x1 = Matrix(sub.state_dim(), samples);
    }

    std::vector<double> state = x_init;
    for (std::size_t k = 0; k < samples; ++k) {
        std::vector<double> input;
        input.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t r = 0; r < inputs[i].rows(); ++r)
                input.push_back(inputs[i](r, k));

        for (std::size_t i = 0; i < count; ++i) {
            const auto& sub = plant.subsystems[i];
            const std::size_t off = plant.state_offset(i);
            for (std::size_t r = 0; r < sub.input_dim(); ++r)
                data[i].u(r, k) = inputs[i](r, k);
            const std::vector<double> phi = eval_phi(plant, i, state);
            for (std::size_t r = 0; r < phi.size(); ++r)
                data[i].phi(r, k) = phi[r];
            for (std::size_t r = 0; r < sub.state_dim(); ++r)
                data[i].x0(r, k) = state[off + r];
        }

        state = step_discrete(plant, state, input);
        if (vec_norm(state) > kBlowUpGuard)
            throw UnstableRollout("state norm exceeded the overflow guard", k + 1);

        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t off = plant.state_offset(i);
            for (std::size_t r = 0; r < plant.subsystems[i].state_dim(); ++r)
                data[i].x1(r, k) = state[off + r];
        }
    }
    return data;
}

Matrix hankel(const Matrix& signal, std::size_t depth) {
    if (depth == 0 || depth > signal.cols())
        throw InvalidParameter("hankel depth must be in [1, T]");
    const std::size_t n = signal.rows();
    const std::size_t t = signal.cols();
    const std::size_t width = t - depth + 1;
    Matrix h(n * depth, width);
    for (std::size_t r = 0; r < depth; ++r)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < width; ++c)
                h(r * n + i, c) = signal(i, c + r);
    return h;
}

bool check_pe(const Matrix& signal, std::size_t order) {
    const Matrix h = hankel(signal, order);
    return numeric_rank(h) == signal.rows() * order;
}

Matrix stack_data(const SubsystemData& data) { return vstack({data.u, data.phi, data.x0}); }

bool check_rank_condition(const SubsystemData& data) {
    const std::size_t expected = data.input_dim() + data.phi_dim() + data.state_dim();
    if (data.samples() < expected)
        return false;
    return numeric_rank(stack_data(data)) == expected;
}

} // namespace ddc
