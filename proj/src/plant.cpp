#include "ddc/plant.hpp"

#include <algorithm>
#include <cmath>

#include "ddc/errors.hpp"
#include "ddc/numerics.hpp"

namespace ddc {

std::size_t SubsystemModel::phi_dim() const {
    std::size_t ell = 0;
    for (const auto& ic : interconnections)
        ell += ic.gain.cols();
    return ell;
}

std::size_t PlantModel::total_state_dim() const {
    std::size_t n = 0;
    for (const auto& sub : subsystems)
        n += sub.state_dim();
    return n;
}

std::size_t PlantModel::state_offset(std::size_t i) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < i; ++k)
        off += subsystems[k].state_dim();
    return off;
}

void PlantModel::validate() const {
    for (std::size_t i = 0; i < subsystems.size(); ++i) {
        const auto& sub = subsystems[i];
        if (sub.a.rows() != sub.a.cols())
            throw InvalidParameter("subsystem A block is not square");
        if (sub.b.rows() != sub.a.rows())
            throw InvalidParameter("subsystem B row count mismatch");
        for (const auto& ic : sub.interconnections) {
            if (ic.neighbor == i)
                throw InvalidParameter("self-referential interconnection");
            if (ic.neighbor >= subsystems.size())
                throw InvalidParameter("interconnection neighbor out of range");
            if (ic.gain.rows() != sub.state_dim())
                throw InvalidParameter("interconnection gain row count mismatch");
            const std::size_t nj = subsystems[ic.neighbor].state_dim();
            const std::vector<double> g0 = ic.signal(std::vector<double>(nj, 0.0));
            if (g0.size() != ic.gain.cols())
                throw InvalidParameter("interconnection signal width mismatch");
            for (double v : g0)
                if (std::abs(v) > 1e-12)
                    throw InvalidParameter("interconnection signal nonzero at the origin");
        }
    }
}

const Matrix& BoundSet::at(std::size_t i, std::size_t j) const {
    const auto it = w.find({i, j});
    if (it == w.end())
        throw InvalidParameter("no bound stored for the requested edge");
    return it->second;
}

PlantModel build_spring_mass_chain(std::size_t mass_count, double mass, double k_spring,
                                   double b_drag) {
    if (mass_count < 2)
        throw InvalidParameter("spring-mass chain needs at least two masses");
    if (mass <= 0.0)
        throw InvalidParameter("mass must be positive");

    PlantModel plant;
    plant.mode = PlantMode::continuous;
    plant.subsystems.reserve(mass_count);

    for (std::size_t i = 0; i < mass_count; ++i) {
        std::vector<std::size_t> neighbors;
        if (i > 0)
            neighbors.push_back(i - 1);
        if (i + 1 < mass_count)
            neighbors.push_back(i + 1);

        SubsystemModel sub;
        const double spring_rate = k_spring / mass;
        const double restoring = spring_rate * static_cast<double>(neighbors.size());
        sub.a = Matrix::from_rows({{0.0, 1.0}, {-restoring, -b_drag}});
        sub.b = Matrix::from_rows({{0.0}, {1.0 / mass}});

        if (k_spring != 0.0) {
            for (std::size_t j : neighbors) {
                Interconnection ic;
                ic.neighbor = j;
                ic.gain = Matrix::from_rows({{0.0}, {spring_rate}});
                ic.signal = [](const std::vector<double>& xj) {
                    return std::vector<double>{xj[0]};
                };
                ic.linear = true;
                ic.signal_jacobian = Matrix::from_rows({{1.0, 0.0}});
                sub.interconnections.push_back(std::move(ic));
            }
        }
        plant.subsystems.push_back(std::move(sub));
    }
    plant.validate();
    return plant;
}

PlantModel discretize_zoh(const PlantModel& plant, double ts) {
    if (plant.mode != PlantMode::continuous)
        throw InvalidParameter("discretize_zoh expects a continuous model");
    if (ts <= 0.0)
        throw InvalidParameter("sampling interval must be positive");

    PlantModel out = plant;
    out.mode = PlantMode::discrete;
    out.ts = ts;

    for (auto& sub : out.subsystems) {
        const std::size_t n = sub.state_dim();
        std::vector<Matrix> input_blocks{sub.b};
        for (const auto& ic : sub.interconnections)
            input_blocks.push_back(ic.gain);
        const Matrix be = hstack(input_blocks);
        const std::size_t p = be.cols();

        // exp([[A, B; 0, 0]] * ts) = [[Ad, Bd], [0, I]]
        Matrix aug(n + p, n + p);
        aug.set_block(0, 0, sub.a * ts);
        aug.set_block(0, n, be * ts);
        const Matrix e = mat_exp(aug);

        sub.a = e.block(0, 0, n, n);
        const Matrix bd = e.block(0, n, n, p);
        sub.b = bd.block(0, 0, n, sub.b.cols());
        std::size_t c0 = sub.b.cols();
        for (auto& ic : sub.interconnections) {
            ic.gain = bd.block(0, c0, n, ic.gain.cols());
            c0 += ic.gain.cols();
        }
    }
    return out;
}

namespace {

std::vector<double> subsystem_state(const PlantModel& plant, std::size_t j,
                                    const std::vector<double>& full_state) {
    const std::size_t off = plant.state_offset(j);
    const std::size_t nj = plant.subsystems[j].state_dim();
    return {full_state.begin() + off, full_state.begin() + off + nj};
}

} // namespace

std::vector<double> eval_phi(const PlantModel& plant, std::size_t i,
                             const std::vector<double>& full_state) {
    if (i >= plant.subsystem_count())
        throw InvalidParameter("eval_phi subsystem index out of range");
    if (full_state.size() != plant.total_state_dim())
        throw InvalidParameter("eval_phi state dimension mismatch");
    std::vector<double> phi;
    phi.reserve(plant.subsystems[i].phi_dim());
    for (const auto& ic : plant.subsystems[i].interconnections) {
        const std::vector<double> gj = ic.signal(subsystem_state(plant, ic.neighbor, full_state));
        phi.insert(phi.end(), gj.begin(), gj.end());
    }
    return phi;
}

namespace {

std::vector<double> plant_rhs(const PlantModel& plant, const std::vector<double>& full_state,
                              const std::vector<double>& full_input) {
    std::vector<double> out(plant.total_state_dim());
    std::size_t in_off = 0;
    for (std::size_t i = 0; i < plant.subsystem_count(); ++i) {
        const auto& sub = plant.subsystems[i];
        const std::vector<double> xi = subsystem_state(plant, i, full_state);
        const std::vector<double> ui{full_input.begin() + in_off,
                                     full_input.begin() + in_off + sub.input_dim()};
        in_off += sub.input_dim();

        std::vector<double> acc = sub.a * xi;
        const std::vector<double> bu = sub.b * ui;
        for (std::size_t r = 0; r < acc.size(); ++r)
            acc[r] += bu[r];
        for (const auto& ic : sub.interconnections) {
            const std::vector<double> g =
                ic.signal(subsystem_state(plant, ic.neighbor, full_state));
            const std::vector<double> gg = ic.gain * g;
            for (std::size_t r = 0; r < acc.size(); ++r)
                acc[r] += gg[r];
        }
        const std::size_t off = plant.state_offset(i);
        for (std::size_t r = 0; r < acc.size(); ++r)
            out[off + r] = acc[r];
    }
    return out;
}

std::size_t total_input_dim(const PlantModel& plant) {
    std::size_t m = 0;
    for (const auto& sub : plant.subsystems)
        m += sub.input_dim();
    return m;
}

} // namespace

std::vector<double> continuous_dynamics(const PlantModel& plant,
                                        const std::vector<double>& full_state,
                                        const std::vector<double>& full_input) {
    if (plant.mode != PlantMode::continuous)
        throw InvalidParameter("continuous_dynamics expects a continuous model");
    if (full_state.size() != plant.total_state_dim() ||
        full_input.size() != total_input_dim(plant))
        throw InvalidParameter("continuous_dynamics dimension mismatch");
    return plant_rhs(plant, full_state, full_input);
}

std::vector<double> step_discrete(const PlantModel& plant, const std::vector<double>& full_state,
                                  const std::vector<double>& full_input) {
    if (plant.mode != PlantMode::discrete)
        throw InvalidParameter("step_discrete expects a discrete model");
    if (full_state.size() != plant.total_state_dim() ||
        full_input.size() != total_input_dim(plant))
        throw InvalidParameter("step_discrete dimension mismatch");
    return plant_rhs(plant, full_state, full_input);
}

BoundSet estimate_bounds(const PlantModel& plant, const std::vector<std::vector<double>>& samples,
                         double safety_factor) {
    if (samples.empty())
        throw EmptySamples("bound estimation needs at least one sample");
    if (safety_factor < 1.0)
        throw InvalidParameter("safety factor below one cannot dominate its own samples");
    for (const auto& s : samples) {
        if (s.size() != plant.total_state_dim())
            throw InvalidParameter("bound estimation sample dimension mismatch");
        if (vec_norm(s) == 0.0)
            throw InvalidParameter("bound estimation sample is identically zero");
    }

    BoundSet bounds;
    bounds.safety_factor = safety_factor;
    for (std::size_t i = 0; i < plant.subsystem_count(); ++i) {
        for (const auto& ic : plant.subsystems[i].interconnections) {
            const std::size_t j = ic.neighbor;
            const std::size_t nj = plant.subsystems[j].state_dim();
            const std::size_t q = ic.gain.cols();
            double ratio = 0.0;
            for (const auto& s : samples) {
                const std::vector<double> xj = subsystem_state(plant, j, s);
                const double xn = vec_norm(xj);
                if (xn == 0.0)
                    continue;
                ratio = std::max(ratio, vec_norm(ic.signal(xj)) / xn);
            }
            const double w_bar = safety_factor * ratio;
            Matrix w(q, nj);
            for (std::size_t r = 0; r < std::min(q, nj); ++r)
                w(r, r) = w_bar;
            bounds.w[{i, j}] = std::move(w);
        }
    }
    return bounds;
}

BoundSet chain_analytic_bounds(const PlantModel& plant) {
    BoundSet bounds;
    bounds.safety_factor = 1.0;
    for (std::size_t i = 0; i < plant.subsystem_count(); ++i) {
        for (const auto& ic : plant.subsystems[i].interconnections) {
            const std::size_t nj = plant.subsystems[ic.neighbor].state_dim();
            Matrix w(1, nj);
            w(0, 0) = 1.0;
            bounds.w[{i, ic.neighbor}] = std::move(w);
        }
    }
    return bounds;
}

} // namespace ddc
