#pragma once

// Exact algebra of n-qubit Pauli strings with bounded support. Axes are kept
// as 2-bit symplectic pairs (x-bit, z-bit), so products and commutation come
// down to XORs and a mod-4 phase exponent; no floating point enters here.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmc {

/// Pauli axis encoded as (x-bit | z-bit << 1). Identity is absence from the
/// support map, never an Axis value.
enum class Axis : std::uint8_t { X = 0b01, Z = 0b10, Y = 0b11 };

inline char axis_char(Axis a) {
    switch (a) {
        case Axis::X: return 'X';
        case Axis::Y: return 'Y';
        case Axis::Z: return 'Z';
    }
    return '?';
}

/// X < Y < Z ordering used for canonical enumeration (enum values are
/// symplectic bits, not ranks).
inline int axis_rank(Axis a) {
    switch (a) {
        case Axis::X: return 0;
        case Axis::Y: return 1;
        case Axis::Z: return 2;
    }
    return 3;
}

inline Axis axis_from_rank(int r) {
    constexpr Axis table[3] = {Axis::X, Axis::Y, Axis::Z};
    return table[r];
}

/// A power of i, exponent mod 4. Real iff the exponent is even.
class Phase {
  public:
    constexpr Phase() = default;
    constexpr explicit Phase(unsigned i_exponent) : exp_(i_exponent & 3u) {}

    constexpr unsigned i_exponent() const { return exp_; }
    constexpr bool is_real() const { return (exp_ & 1u) == 0; }

    /// +1 or -1; only meaningful for real phases.
    constexpr int real_sign() const { return exp_ == 0 ? 1 : -1; }

    constexpr Phase operator*(Phase o) const { return Phase(exp_ + o.exp_); }
    constexpr bool operator==(const Phase&) const = default;

  private:
    std::uint8_t exp_ = 0;
};

/// Tensor product of single-qubit Paulis on qubits strictly below n. The
/// support map is a sorted inline array of (qubit, axis) pairs; qubits not
/// listed carry the identity. Value type, structurally comparable.
class PauliString {
  public:
    static constexpr std::size_t kMaxSupport = 8;

    explicit PauliString(std::uint32_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("PauliString: n must be >= 1");
    }

    static PauliString identity(std::uint32_t n) { return PauliString(n); }

    static PauliString single(std::uint32_t n, std::uint32_t qubit, Axis a) {
        PauliString p(n);
        p.set(qubit, a);
        return p;
    }

    static PauliString two(std::uint32_t n, std::uint32_t q1, Axis a1,
                           std::uint32_t q2, Axis a2) {
        if (q1 == q2) throw std::invalid_argument("PauliString: repeated qubit");
        PauliString p(n);
        p.set(q1, a1);
        p.set(q2, a2);
        return p;
    }

    std::uint32_t qubit_count() const { return n_; }
    std::size_t weight() const { return size_; }
    bool is_identity() const { return size_ == 0; }

    std::uint32_t qubit(std::size_t k) const { return entries_[k].first; }
    Axis axis(std::size_t k) const { return entries_[k].second; }

    /// Inserts (qubit, axis), keeping entries sorted by qubit index.
    void set(std::uint32_t qubit, Axis a) {
        if (qubit >= n_) throw std::out_of_range("PauliString: qubit index >= n");
        std::size_t pos = 0;
        while (pos < size_ && entries_[pos].first < qubit) ++pos;
        if (pos < size_ && entries_[pos].first == qubit)
            throw std::invalid_argument("PauliString: repeated qubit");
        if (size_ == kMaxSupport)
            throw std::length_error("PauliString: support bound exceeded");
        for (std::size_t k = size_; k > pos; --k) entries_[k] = entries_[k - 1];
        entries_[pos] = {qubit, a};
        ++size_;
    }

    bool operator==(const PauliString& o) const {
        if (n_ != o.n_ || size_ != o.size_) return false;
        for (std::size_t k = 0; k < size_; ++k)
            if (entries_[k] != o.entries_[k]) return false;
        return true;
    }

    /// Canonical order: graded by weight, then lexicographic on the support
    /// list with axes ordered X < Y < Z. Matches the enumeration order.
    bool operator<(const PauliString& o) const {
        if (size_ != o.size_) return size_ < o.size_;
        for (std::size_t k = 0; k < size_; ++k) {
            if (entries_[k].first != o.entries_[k].first)
                return entries_[k].first < o.entries_[k].first;
            int ra = axis_rank(entries_[k].second), rb = axis_rank(o.entries_[k].second);
            if (ra != rb) return ra < rb;
        }
        return false;
    }

    /// Packs the support into one word: 4 entries of (qubit:14, axis:2).
    /// Only valid for weight <= 4, which covers every product of two
    /// 2-local strings.
    std::uint64_t support_key() const {
        if (size_ > 4) throw std::length_error("support_key: weight > 4");
        std::uint64_t key = 0;
        for (std::size_t k = 0; k < size_; ++k) {
            std::uint64_t packed =
                (std::uint64_t(entries_[k].first + 1) << 2) |
                std::uint64_t(static_cast<std::uint8_t>(entries_[k].second));
            key |= packed << (16 * k);
        }
        return key;
    }

    /// "X0*Y3" style rendering; "I" for the identity.
    std::string str() const {
        if (size_ == 0) return "I";
        std::string out;
        for (std::size_t k = 0; k < size_; ++k) {
            if (k) out += '*';
            out += axis_char(entries_[k].second);
            out += std::to_string(entries_[k].first);
        }
        return out;
    }

  private:
    std::uint32_t n_;
    std::size_t size_ = 0;
    std::array<std::pair<std::uint32_t, Axis>, kMaxSupport> entries_{};
};

/// p * q = phase * result. Phase accumulates i^(x1 z1 + x2 z2 + 2 z1 x2 - x3 z3)
/// per overlapping qubit under the convention P(x,z) = i^(xz) X^x Z^z.
inline std::pair<Phase, PauliString> multiply(const PauliString& p, const PauliString& q) {
    if (p.qubit_count() != q.qubit_count())
        throw std::invalid_argument("multiply: mismatched qubit counts");
    PauliString out(p.qubit_count());
    unsigned e = 0;
    std::size_t a = 0, b = 0;
    while (a < p.weight() || b < q.weight()) {
        if (b == q.weight() || (a < p.weight() && p.qubit(a) < q.qubit(b))) {
            out.set(p.qubit(a), p.axis(a));
            ++a;
        } else if (a == p.weight() || q.qubit(b) < p.qubit(a)) {
            out.set(q.qubit(b), q.axis(b));
            ++b;
        } else {
            unsigned v1 = static_cast<unsigned>(p.axis(a));
            unsigned v2 = static_cast<unsigned>(q.axis(b));
            unsigned x1 = v1 & 1, z1 = v1 >> 1, x2 = v2 & 1, z2 = v2 >> 1;
            unsigned x3 = x1 ^ x2, z3 = z1 ^ z2;
            e += x1 * z1 + x2 * z2 + 2 * (z1 * x2) + 4 - x3 * z3;
            if (x3 | z3)
                out.set(p.qubit(a), static_cast<Axis>((z3 << 1) | x3));
            ++a;
            ++b;
        }
    }
    return {Phase(e), out};
}

/// True iff pq = qp: the number of qubits where both act with different axes
/// is even.
inline bool commutes(const PauliString& p, const PauliString& q) {
    if (p.qubit_count() != q.qubit_count())
        throw std::invalid_argument("commutes: mismatched qubit counts");
    unsigned parity = 0;
    std::size_t a = 0, b = 0;
    while (a < p.weight() && b < q.weight()) {
        if (p.qubit(a) < q.qubit(b)) {
            ++a;
        } else if (q.qubit(b) < p.qubit(a)) {
            ++b;
        } else {
            unsigned v1 = static_cast<unsigned>(p.axis(a));
            unsigned v2 = static_cast<unsigned>(q.axis(b));
            // symplectic form: x1 z2 + z1 x2 mod 2
            parity ^= ((v1 & 1) & (v2 >> 1)) ^ ((v1 >> 1) & (v2 & 1));
            ++a;
            ++b;
        }
    }
    return parity == 0;
}

/// All strings of weight <= 1: identity first, then (qubit, axis) order.
inline std::vector<PauliString> enumerate_p1(std::uint32_t n) {
    if (n < 1) throw std::invalid_argument("enumerate_p1: n must be >= 1");
    std::vector<PauliString> out;
    out.reserve(1 + 3 * std::size_t(n));
    out.push_back(PauliString::identity(n));
    for (std::uint32_t q = 0; q < n; ++q)
        for (int r = 0; r < 3; ++r)
            out.push_back(PauliString::single(n, q, axis_from_rank(r)));
    return out;
}

/// Ordered basis of P_2(n): identity, weight-1 by (qubit, axis), weight-2 by
/// lexicographic support list. Length 1 + 3n + 9 n(n-1)/2. The order is part
/// of the contract: SDP matrix indices must be reproducible across runs.
inline std::vector<PauliString> enumerate_p2(std::uint32_t n) {
    std::vector<PauliString> out = enumerate_p1(n);
    out.reserve(1 + 3 * std::size_t(n) + 9 * std::size_t(n) * (n - 1) / 2);
    for (std::uint32_t q1 = 0; q1 < n; ++q1)
        for (int r1 = 0; r1 < 3; ++r1)
            for (std::uint32_t q2 = q1 + 1; q2 < n; ++q2)
                for (int r2 = 0; r2 < 3; ++r2)
                    out.push_back(PauliString::two(n, q1, axis_from_rank(r1), q2,
                                                   axis_from_rank(r2)));
    return out;
}

}  // namespace qmc
