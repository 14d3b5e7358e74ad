// SPDX-License-Identifier: Apache-2.0
//
// Vector-field reconstruction over the voxel map: least-squares data fit
// plus Huber-smoothed L1 penalties on discrete curl and divergence, solved
// by gradient descent with a backtracking (Armijo) line search.

#include "pentrack/magmap.hpp"

#include <cmath>
#include <stdexcept>

namespace pentrack {

namespace {

// One-dimensional derivative stencil at index i of n: centred inside, one
// sided at the ends. Writes up to two (index, coefficient) pairs.
struct Stencil {
    int idx[2];
    double coef[2];
};

Stencil d_stencil(int i, int n, double h) {
    if (i == 0) return {{0, 1}, {-1.0 / h, 1.0 / h}};
    if (i == n - 1) return {{n - 2, n - 1}, {-1.0 / h, 1.0 / h}};
    return {{i - 1, i + 1}, {-0.5 / h, 0.5 / h}};
}

double huber(double u, double delta) {
    double a = std::abs(u);
    return a <= delta ? u * u / (2.0 * delta) : a - delta / 2.0;
}

double huber_grad(double u, double delta) {
    if (u > delta) return 1.0;
    if (u < -delta) return -1.0;
    return u / delta;
}

// Field component accessor over the flat Vec3 array.
inline double comp(const Vec3& v, int c) { return c == 0 ? v.x : (c == 1 ? v.y : v.z); }
inline double& comp(Vec3& v, int c) { return c == 0 ? v.x : (c == 1 ? v.y : v.z); }

struct Grid {
    int nx, ny, nz;
    double h;
    size_t index(int x, int y, int z) const {
        return static_cast<size_t>(x) + nx * (static_cast<size_t>(y) + ny * z);
    }
};

// Derivative of component c along axis a at cell (x,y,z) of g.
double deriv(const std::vector<Vec3>& g, const Grid& gr, int x, int y, int z, int c, int a) {
    int pos[3] = {x, y, z};
    int n = a == 0 ? gr.nx : (a == 1 ? gr.ny : gr.nz);
    Stencil s = d_stencil(pos[a], n, gr.h);
    double val = 0.0;
    for (int k = 0; k < 2; ++k) {
        int q[3] = {x, y, z};
        q[a] = s.idx[k];
        val += s.coef[k] * comp(g[gr.index(q[0], q[1], q[2])], c);
    }
    return val;
}

// Adds w * d(deriv)/d(g) into the gradient (the adjoint of one stencil).
void deriv_adjoint(std::vector<Vec3>& grad, const Grid& gr, int x, int y, int z, int c,
                   int a, double w) {
    int pos[3] = {x, y, z};
    int n = a == 0 ? gr.nx : (a == 1 ? gr.ny : gr.nz);
    Stencil s = d_stencil(pos[a], n, gr.h);
    for (int k = 0; k < 2; ++k) {
        int q[3] = {x, y, z};
        q[a] = s.idx[k];
        comp(grad[gr.index(q[0], q[1], q[2])], c) += w * s.coef[k];
    }
}

struct EnergyGrad {
    double energy = 0.0;
    std::vector<Vec3> grad;
};

// Curl components as (component, axis) derivative pairs:
//   curl_0 = dFz/dy - dFy/dz, curl_1 = dFx/dz - dFz/dx, curl_2 = dFy/dx - dFx/dy
constexpr int kCurlPlus[3][2] = {{2, 1}, {0, 2}, {1, 0}};  // {component, axis}
constexpr int kCurlMinus[3][2] = {{1, 2}, {2, 0}, {0, 1}};

double energy_only(const std::vector<Vec3>& g, const VoxelField& obs, const Grid& gr,
                   const ReconstructionConfig& cfg) {
    double e = 0.0;
    for (size_t i = 0; i < g.size(); ++i)
        if (obs.count[i] > 0) {
            Vec3 r = g[i] - obs.mean[i];
            e += dot(r, r);
        }
    for (int z = 0; z < gr.nz; ++z)
        for (int y = 0; y < gr.ny; ++y)
            for (int x = 0; x < gr.nx; ++x) {
                if (cfg.lambda_div != 0.0) {
                    double div = deriv(g, gr, x, y, z, 0, 0) + deriv(g, gr, x, y, z, 1, 1) +
                                 deriv(g, gr, x, y, z, 2, 2);
                    e += cfg.lambda_div * huber(div, cfg.huber_delta);
                }
                if (cfg.lambda_curl != 0.0)
                    for (int k = 0; k < 3; ++k) {
                        double c = deriv(g, gr, x, y, z, kCurlPlus[k][0], kCurlPlus[k][1]) -
                                   deriv(g, gr, x, y, z, kCurlMinus[k][0], kCurlMinus[k][1]);
                        e += cfg.lambda_curl * huber(c, cfg.huber_delta);
                    }
            }
    return e;
}

EnergyGrad energy_and_grad(const std::vector<Vec3>& g, const VoxelField& obs, const Grid& gr,
                           const ReconstructionConfig& cfg) {
    EnergyGrad out;
    out.grad.assign(g.size(), Vec3{});
    for (size_t i = 0; i < g.size(); ++i)
        if (obs.count[i] > 0) {
            Vec3 r = g[i] - obs.mean[i];
            out.energy += dot(r, r);
            out.grad[i] += 2.0 * r;
        }
    for (int z = 0; z < gr.nz; ++z)
        for (int y = 0; y < gr.ny; ++y)
            for (int x = 0; x < gr.nx; ++x) {
                if (cfg.lambda_div != 0.0) {
                    double div = deriv(g, gr, x, y, z, 0, 0) + deriv(g, gr, x, y, z, 1, 1) +
                                 deriv(g, gr, x, y, z, 2, 2);
                    out.energy += cfg.lambda_div * huber(div, cfg.huber_delta);
                    double w = cfg.lambda_div * huber_grad(div, cfg.huber_delta);
                    deriv_adjoint(out.grad, gr, x, y, z, 0, 0, w);
                    deriv_adjoint(out.grad, gr, x, y, z, 1, 1, w);
                    deriv_adjoint(out.grad, gr, x, y, z, 2, 2, w);
                }
                if (cfg.lambda_curl != 0.0)
                    for (int k = 0; k < 3; ++k) {
                        double c = deriv(g, gr, x, y, z, kCurlPlus[k][0], kCurlPlus[k][1]) -
                                   deriv(g, gr, x, y, z, kCurlMinus[k][0], kCurlMinus[k][1]);
                        out.energy += cfg.lambda_curl * huber(c, cfg.huber_delta);
                        double w = cfg.lambda_curl * huber_grad(c, cfg.huber_delta);
                        deriv_adjoint(out.grad, gr, x, y, z, kCurlPlus[k][0], kCurlPlus[k][1], w);
                        deriv_adjoint(out.grad, gr, x, y, z, kCurlMinus[k][0], kCurlMinus[k][1], -w);
                    }
            }
    return out;
}

} // namespace

DivCurl discrete_div_curl(const VoxelField& map) {
    if (map.nx < 2 || map.ny < 2 || map.nz < 2)
        throw std::invalid_argument("div/curl needs at least 2 cells per axis");
    Grid gr{map.nx, map.ny, map.nz, map.cell_mm};
    DivCurl out;
    out.div.resize(map.cells());
    out.curl.resize(map.cells());
    for (int z = 0; z < map.nz; ++z)
        for (int y = 0; y < map.ny; ++y)
            for (int x = 0; x < map.nx; ++x) {
                size_t i = gr.index(x, y, z);
                out.div[i] = deriv(map.mean, gr, x, y, z, 0, 0) +
                             deriv(map.mean, gr, x, y, z, 1, 1) +
                             deriv(map.mean, gr, x, y, z, 2, 2);
                for (int k = 0; k < 3; ++k)
                    comp(out.curl[i], k) =
                        deriv(map.mean, gr, x, y, z, kCurlPlus[k][0], kCurlPlus[k][1]) -
                        deriv(map.mean, gr, x, y, z, kCurlMinus[k][0], kCurlMinus[k][1]);
            }
    return out;
}

ReconstructionResult reconstruct(const VoxelField& map, const ReconstructionConfig& cfg) {
    if (map.nx < 2 || map.ny < 2 || map.nz < 2)
        throw std::invalid_argument("reconstruction needs at least 2 cells per axis");
    if (cfg.lambda_curl < 0.0 || cfg.lambda_div < 0.0)
        throw std::invalid_argument("regularization weights must be nonnegative");

    Grid gr{map.nx, map.ny, map.nz, map.cell_mm};
    ReconstructionResult res;
    res.field = nn_fill(map); // throws when nothing was observed

    std::vector<Vec3> g = res.field.mean;
    double step = 0.25;
    double energy = energy_only(g, map, gr, cfg);
    res.energy.push_back(energy);

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        EnergyGrad eg = energy_and_grad(g, map, gr, cfg);
        double gnorm2 = 0.0;
        for (const Vec3& v : eg.grad) gnorm2 += dot(v, v);
        if (gnorm2 <= 1e-24) {
            res.converged = true;
            break;
        }

        // Backtrack until the Armijo condition holds; bail out once the step
        // underflows (the iterate is then as good as converged).
        bool accepted = false;
        std::vector<Vec3> trial(g.size());
        double trial_energy = 0.0;
        while (step > 1e-14) {
            for (size_t i = 0; i < g.size(); ++i) trial[i] = g[i] - step * eg.grad[i];
            trial_energy = energy_only(trial, map, gr, cfg);
            if (trial_energy <= energy - 1e-4 * step * gnorm2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.converged = true;
            break;
        }

        double improvement = energy - trial_energy;
        g.swap(trial);
        energy = trial_energy;
        res.energy.push_back(energy);
        res.iterations = iter + 1;
        step *= 1.3;
        if (improvement < cfg.tol) {
            res.converged = true;
            break;
        }
    }

    res.field.mean = std::move(g);
    for (size_t i = 0; i < res.field.cells(); ++i)
        if (res.field.count[i] <= 0) res.field.count[i] = 1;
    return res;
}

std::pair<double, double> grid_search_lambda(const VoxelField& map,
                                             const std::vector<std::pair<double, double>>& candidates,
                                             const std::vector<size_t>& validation_cells,
                                             const ReconstructionConfig& base) {
    if (candidates.empty()) throw std::invalid_argument("no candidate weights given");
    if (validation_cells.empty()) throw std::invalid_argument("no validation cells given");

    VoxelField train = map;
    for (size_t idx : validation_cells) {
        if (idx >= map.cells()) throw std::invalid_argument("validation cell out of range");
        if (map.count[idx] <= 0)
            throw std::invalid_argument("validation cells must be observed");
        train.count[idx] = 0;
        train.mean[idx] = Vec3{};
    }

    std::pair<double, double> best = candidates.front();
    double best_err = 1e300;
    for (const auto& [lc, ld] : candidates) {
        ReconstructionConfig cfg = base;
        cfg.lambda_curl = lc;
        cfg.lambda_div = ld;
        ReconstructionResult r = reconstruct(train, cfg);
        double err = 0.0;
        for (size_t idx : validation_cells) {
            Vec3 d = r.field.mean[idx] - map.mean[idx];
            err += dot(d, d);
        }
        if (err < best_err) {
            best_err = err;
            best = {lc, ld};
        }
    }
    return best;
}

std::vector<std::pair<double, double>> default_lambda_candidates() {
    std::vector<std::pair<double, double>> out;
    for (double lc : {0.0, 0.01, 0.1, 0.3})
        for (double ld : {0.3, 1.0, 1.5, 3.0}) out.push_back({lc, ld});
    return out;
}

} // namespace pentrack
