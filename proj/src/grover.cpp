#include "qxtalk/grover.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qxtalk {

void GroverSpec::validate() const {
    if (n < 1) throw std::invalid_argument("grover: n must be at least 1");
    if (n > 30) throw std::invalid_argument("grover: n too large");
    if (iterations < 0) throw std::invalid_argument("grover: iterations must be non-negative");
    if (static_cast<int>(marked.size()) != n) throw std::invalid_argument("grover: marked string must have n bits");
    for (char ch : marked) {
        if (ch != '0' && ch != '1') throw std::invalid_argument("grover: marked string must be binary");
    }
}

std::size_t GroverSpec::marked_index() const {
    validate();
    std::size_t idx = 0;
    for (int q = 0; q < n; ++q) {
        if (marked[static_cast<std::size_t>(n - 1 - q)] == '1') idx |= std::size_t{1} << q;
    }
    return idx;
}

namespace {

void append_ccz(Circuit& c, int a, int b, int t) {
    c.cx(b, t).tdg(t).cx(a, t).t(t).cx(b, t).tdg(t).cx(a, t);
    c.t(b).t(t);
    c.cx(a, b).t(a).tdg(b).cx(a, b);
}

// exp(i*pi*x_1...x_k) as a sum of parity phases:
//   x_1...x_k = 2^(1-k) * sum over non-empty S of (-1)^(|S|-1) * parity(S).
// Each parity is folded onto the highest qubit of S by a CX ladder.
void append_phase_polynomial_mcz(Circuit& c, const std::vector<int>& qubits) {
    const int k = static_cast<int>(qubits.size());
    const double unit = std::numbers::pi / std::ldexp(1.0, k - 1);
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        std::vector<int> members;
        for (int i = 0; i < k; ++i) {
            if (mask & (1u << i)) members.push_back(qubits[static_cast<std::size_t>(i)]);
        }
        const int target = members.back();
        const double sign = (members.size() % 2 == 1) ? 1.0 : -1.0;
        for (std::size_t i = 0; i + 1 < members.size(); ++i) c.cx(members[i], target);
        // diag(1, e^{i phi}) equals RZ(phi) up to global phase.
        c.rz(sign * unit, target);
        for (std::size_t i = members.size() - 1; i-- > 0;) c.cx(members[i], target);
    }
}

}  // namespace

void append_mcz(Circuit& c, const std::vector<int>& qubits) {
    switch (qubits.size()) {
        case 0:
            return;
        case 1:
            c.z(qubits[0]);
            return;
        case 2:
            c.h(qubits[1]).cx(qubits[0], qubits[1]).h(qubits[1]);
            return;
        case 3:
            append_ccz(c, qubits[0], qubits[1], qubits[2]);
            return;
        default:
            append_phase_polynomial_mcz(c, qubits);
    }
}

Circuit build_grover(const GroverSpec& spec) {
    spec.validate();
    if (spec.n > 8) throw std::invalid_argument("grover: n above the desk-scale limit of 8");
    const int n = spec.n;
    Circuit c(n, n);
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) all[static_cast<std::size_t>(q)] = q;

    for (int q : all) c.h(q);
    for (int it = 0; it < spec.iterations; ++it) {
        for (int q = 0; q < n; ++q) {
            if (spec.marked[static_cast<std::size_t>(n - 1 - q)] == '0') c.x(q);
        }
        append_mcz(c, all);
        for (int q = 0; q < n; ++q) {
            if (spec.marked[static_cast<std::size_t>(n - 1 - q)] == '0') c.x(q);
        }

        for (int q : all) c.h(q);
        for (int q : all) c.x(q);
        append_mcz(c, all);
        for (int q : all) c.x(q);
        for (int q : all) c.h(q);
    }
    c.barrier(all);
    for (int q : all) c.measure(q, q);
    return c;
}

std::vector<double> ideal_distribution(const GroverSpec& spec) {
    spec.validate();
    const std::size_t dim = std::size_t{1} << spec.n;
    const double theta = std::asin(std::pow(2.0, -0.5 * spec.n));
    const double s = std::sin((2.0 * spec.iterations + 1.0) * theta);
    const double p_marked = s * s;
    std::vector<double> out(dim, dim > 1 ? (1.0 - p_marked) / static_cast<double>(dim - 1) : 0.0);
    out[spec.marked_index()] = dim > 1 ? p_marked : 1.0;
    return out;
}

}  // namespace qxtalk
