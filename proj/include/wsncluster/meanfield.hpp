#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

// Closed-form mean-field description of the evolving cluster network: degree
// growth law, stationary degree distribution, the deletion rate that
// maximizes the head fraction, and head-count prediction for deployments.
namespace wsncluster::meanfield {

namespace detail {
[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw std::domain_error(where + ": " + what);
}
}  // namespace detail

// Coefficients of the reduced degree-growth law  dk/dt = (a*k + b - 2*z*c) / t:
//   degree_coeff   (a) multiplies the node's own degree,
//   intake_coeff   (b) is the constant attachment inflow,
//   deletion_coeff (c) scales the link-deletion drain.
struct MeanFieldConstants {
    double degree_coeff;
    double intake_coeff;
    double deletion_coeff;
};

// Coefficients as functions of the cluster-head arrival probability p.
inline MeanFieldConstants constants(double p) {
    if (!(p > 0.0 && p < 1.0)) detail::fail("constants", "p must lie in (0, 1)");
    return {p / (1.0 + p), (1.0 - p) / p, 1.0 / (p * (1.0 - p))};
}

// Degree-growth rate when every cluster head is an equally likely target:
// one newcomer spread over the m0 + p*t heads present at time t.
inline double uniform_attachment_rate(double t, double m0, double p) {
    if (!(m0 >= 1.0)) detail::fail("uniform_attachment_rate", "m0 must be >= 1");
    if (!(t >= 0.0)) detail::fail("uniform_attachment_rate", "t must be >= 0");
    if (!(p > 0.0 && p < 1.0)) detail::fail("uniform_attachment_rate", "p must lie in (0, 1)");
    return 1.0 / (m0 + p * t);
}

// Mean degree over cluster heads: total degree (2*m0 + t + p*t) over head
// count (m0 + p*t).  Tends to (1 + p) / p as t grows.
inline double mean_degree(double t, double m0, double p) {
    if (!(m0 >= 1.0)) detail::fail("mean_degree", "m0 must be >= 1");
    if (!(t >= 0.0)) detail::fail("mean_degree", "t must be >= 0");
    if (!(p > 0.0 && p < 1.0)) detail::fail("mean_degree", "p must lie in (0, 1)");
    return (2.0 * m0 + t + p * t) / (m0 + p * t);
}

// Long-run mean number of head-to-head links per head.
constexpr double mean_cluster_edges() { return 2.0; }

// Reduced growth law dk/dt at degree k and time t under deletion rate z.
inline double reduced_rate(double k, double t, const MeanFieldConstants& c, double z) {
    if (!(t > 0.0)) detail::fail("reduced_rate", "t must be > 0");
    return (c.degree_coeff * k + c.intake_coeff - 2.0 * z * c.deletion_coeff) / t;
}

// Degree at time t of a head born at t_birth with one link, i.e. the solution
// of the reduced growth law with k(t_birth) = 1:
//   k(t) = ((a + b - 2*z*c) * (t / t_birth)^a - b + 2*z*c) / a.
inline double degree_trajectory(double t, double t_birth, const MeanFieldConstants& c, double z) {
    if (!(t_birth > 0.0)) detail::fail("degree_trajectory", "t_birth must be > 0");
    if (!(t >= t_birth)) detail::fail("degree_trajectory", "t must be >= t_birth");
    const double growth = c.degree_coeff + c.intake_coeff - 2.0 * z * c.deletion_coeff;
    if (!(growth > 0.0)) detail::fail("degree_trajectory", "a + b - 2*z*c must be > 0");
    const double ratio = std::pow(t / t_birth, c.degree_coeff);
    return (growth * ratio - c.intake_coeff + 2.0 * z * c.deletion_coeff) / c.degree_coeff;
}

// A point (k, p, z) at which to evaluate the stationary degree distribution.
struct DegreeDistributionQuery {
    double k;
    double p;
    double z;

    DegreeDistributionQuery(double k_, double p_, double z_) : k(k_), p(p_), z(z_) {
        if (!(k >= 1.0)) detail::fail("DegreeDistributionQuery", "k must be >= 1");
        if (!(p > 0.0 && p < 1.0)) detail::fail("DegreeDistributionQuery", "p must lie in (0, 1)");
        const auto c = constants(p);
        if (!(c.degree_coeff + c.intake_coeff - 2.0 * z * c.deletion_coeff > 0.0))
            detail::fail("DegreeDistributionQuery", "a + b - 2*z*c must be > 0");
    }
};

// Stationary degree distribution (unnormalized):
//   P(k) = (a + b - 2*z*c)^(1/a) * (k*a + b - 2*z*c)^(-1/a - 1),
// so P(1) = 1 / (a + b - 2*z*c) and the large-k tail falls as k^(-(1+2p)/p).
inline double degree_distribution(const DegreeDistributionQuery& q) {
    const auto c = constants(q.p);
    const double growth = c.degree_coeff + c.intake_coeff - 2.0 * q.z * c.deletion_coeff;
    const double shifted = q.k * c.degree_coeff + c.intake_coeff - 2.0 * q.z * c.deletion_coeff;
    const double inv_a = 1.0 / c.degree_coeff;
    return std::pow(growth, inv_a) * std::pow(shifted, -inv_a - 1.0);
}

// Deletion rate at which the stationary probability of degree k peaks:
//   z* = (1 + a + b - k) / (2 * c).
// Negative z* means degree k is most probable only if links are added back
// faster than they are deleted.
inline double z_critical(double k, double p) {
    if (!(k >= 1.0)) detail::fail("z_critical", "k must be >= 1");
    const auto c = constants(p);
    return (1.0 + c.degree_coeff + c.intake_coeff - k) / (2.0 * c.deletion_coeff);
}

// Head-arrival probability recovered from a target mean degree.
struct ClusterProbability {
    double value;
    bool in_model_range;  // true when 0 < value < 0.5
};

// Inverts mean_degree's long-run limit (1 + p)/p extended by the two
// head-to-head links per head: solves (k - 1) * p^2 + (k - 1) * p - 1 = 0
// for its positive root.
inline ClusterProbability p_of_k(double k) {
    if (!(k > 1.0)) detail::fail("p_of_k", "k must be > 1");
    const double value = 0.5 * (std::sqrt((k + 3.0) / (k - 1.0)) - 1.0);
    return {value, value > 0.0 && value < 0.5};
}

// Expected number of cluster heads in a deployment of n_nodes nodes whose
// topology sustains mean degree k.  Rounded up: a fractional head still has
// to be staffed by a whole node.
inline int predict_cluster_count(int n_nodes, double k) {
    if (n_nodes < 1) detail::fail("predict_cluster_count", "n_nodes must be >= 1");
    const double expected = n_nodes * p_of_k(k).value;
    return static_cast<int>(std::ceil(expected - 1e-9));
}

// Mean-field share of the total degree held by a head of degree k_i.
inline double degree_share(double k_i, double t, double m0, double p) {
    if (!(m0 >= 1.0)) detail::fail("degree_share", "m0 must be >= 1");
    if (!(t >= 0.0)) detail::fail("degree_share", "t must be >= 0");
    if (!(k_i >= 0.0)) detail::fail("degree_share", "k_i must be >= 0");
    return k_i / (2.0 * m0 + t + p * t);
}

// Mean-field share of all head-to-head link endpoints held by a head with
// c_i head-to-head links.
inline double cluster_edge_share(double c_i, double t, double m0, double p) {
    if (!(m0 >= 1.0)) detail::fail("cluster_edge_share", "m0 must be >= 1");
    if (!(t >= 0.0)) detail::fail("cluster_edge_share", "t must be >= 0");
    if (!(c_i >= 0.0)) detail::fail("cluster_edge_share", "c_i must be >= 0");
    return c_i / (2.0 * (m0 + p * t));
}

// Operating point of the full (pre-reduction) growth equation.
struct MeanFieldParams {
    double p;            // head-arrival probability
    double z;            // link-deletion rate
    double m0;           // seed head count
    double local_world;  // local-world size M

    MeanFieldParams(double p_, double z_, double m0_, double local_world_)
        : p(p_), z(z_), m0(m0_), local_world(local_world_) {
        if (!(p > 0.0 && p < 1.0)) detail::fail("MeanFieldParams", "p must lie in (0, 1)");
        if (!(z >= 0.0)) detail::fail("MeanFieldParams", "z must be >= 0");
        if (!(m0 >= 1.0)) detail::fail("MeanFieldParams", "m0 must be >= 1");
        if (!(local_world >= 1.0)) detail::fail("MeanFieldParams", "local_world must be >= 1");
    }
};

// Full mean-field growth rate of a head's degree before any reduction:
// local-world attachment by degree share (head newcomers) and by
// head-to-head link share (ordinary newcomers), both damped by the
// saturation factor (1 - k/kmax), minus the mean-field deletion drain.
inline double full_rate(double k_i, double c_i, double kmax_i, double t,
                        const MeanFieldParams& mp, double k_share, double c_share) {
    if (!(t > 0.0)) detail::fail("full_rate", "t must be > 0");
    if (!(kmax_i >= 1.0)) detail::fail("full_rate", "kmax_i must be >= 1");
    if (!(k_i >= 0.0 && k_i <= kmax_i)) detail::fail("full_rate", "k_i must lie in [0, kmax_i]");
    if (!(c_i >= 0.0)) detail::fail("full_rate", "c_i must be >= 0");
    const double heads = mp.m0 + mp.p * t;
    const double saturation = 1.0 - k_i / kmax_i;
    const double attach = (mp.local_world / heads) *
                          (mp.p * saturation * k_share + (1.0 - mp.p) * saturation * c_share);
    const double drain = 2.0 * mp.local_world * mp.z * (2.0 * mp.m0 + t) /
                         (heads * heads * (mp.m0 + t - mp.p * t));
    return attach - drain;
}

}  // namespace wsncluster::meanfield
