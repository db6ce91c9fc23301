#include <tmf/toric.hpp>

#include <algorithm>
#include <numeric>
#include <functional>

namespace tmf {

Rat det_rational(std::vector<std::vector<Rat>> a) {
    size_t n = a.size();
    Rat det(1);
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return Rat(0);
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (size_t r = c + 1; r < n; ++r) {
            if (a[r][c] == 0) continue;
            Rat f = a[r][c] / a[c][c];
            for (size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

std::optional<std::vector<Rat>> solve_square(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
    size_t n = a.size();
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return std::nullopt;
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            Rat f = a[r][c] / a[c][c];
            for (size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<Rat> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

namespace {

long gcd_abs(long a, long b) { return std::gcd(std::abs(a), std::abs(b)); }

bool is_primitive(const std::vector<long>& v) {
    long g = 0;
    for (long x : v) g = gcd_abs(g, x);
    return g == 1;
}

void enumerate_subsets(int d, int n, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(n);
    std::function<void(int, int)> rec = [&](int start, int k) {
        if (k == n) {
            fn(idx);
            return;
        }
        for (int i = start; i <= d - (n - k); ++i) {
            idx[k] = i;
            rec(i + 1, k + 1);
        }
    };
    rec(0, 0);
}

}  // namespace

ValidatedPolytope validate_delzant(const PolytopeSpec& spec) {
    const int n = spec.n, d = spec.d();
    if (n < 1) throw NotDelzant("dimension must be positive");
    if (d < n + 1) throw NotDelzant("fewer than n+1 facets");
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(spec.facets[i].normal.size()) != n)
            throw NotDelzant("normal " + std::to_string(i) + " has wrong length");
        if (!is_primitive(spec.facets[i].normal))
            throw NotDelzant("normal " + std::to_string(i) + " is not primitive");
    }

    ValidatedPolytope vp;
    vp.spec = spec;
    enumerate_subsets(d, n, [&](const std::vector<int>& sub) {
        std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n));
        std::vector<Rat> b(n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) a[r][c] = Rat(spec.facets[sub[r]].normal[c]);
            b[r] = spec.facets[sub[r]].offset;
        }
        auto x = solve_square(a, b);
        if (!x) return;
        for (int i = 0; i < d; ++i) {
            Rat dot(0);
            for (int c = 0; c < n; ++c) dot += Rat(spec.facets[i].normal[c]) * (*x)[c];
            if (dot > spec.facets[i].offset) return;
        }
        for (const auto& v : vp.vertices)
            if (v == *x) return;
        vp.vertices.push_back(*x);
    });
    if (vp.vertices.empty()) throw NotDelzant("no vertices");

    for (const auto& v : vp.vertices) {
        std::vector<int> active;
        for (int i = 0; i < d; ++i) {
            Rat dot(0);
            for (int c = 0; c < n; ++c) dot += Rat(spec.facets[i].normal[c]) * v[c];
            if (dot == spec.facets[i].offset) active.push_back(i);
        }
        if (static_cast<int>(active.size()) != n)
            throw NotDelzant("a vertex meets " + std::to_string(active.size()) +
                             " facets, expected " + std::to_string(n));
        std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m[r][c] = Rat(spec.facets[active[r]].normal[c]);
        Rat det = det_rational(m);
        if (det != 1 && det != -1)
            throw NotDelzant("vertex normals are not a Z-basis (det " + rat_str(det) + ")");
        vp.vertex_facets.push_back(active);
    }

    std::vector<bool> touched(d, false);
    for (const auto& act : vp.vertex_facets)
        for (int i : act) touched[i] = true;
    for (int i = 0; i < d; ++i)
        if (!touched[i]) throw NotDelzant("facet " + std::to_string(i) + " carries no vertex");
    return vp;
}

std::vector<std::vector<long>> integer_kernel(const std::vector<std::vector<long>>& rows_a,
                                              int ncols) {
    // Column elimination over Z with a unimodular transform; kernel basis =
    // transform columns below the zero columns of the reduced matrix.
    const int nrows = static_cast<int>(rows_a.size());
    std::vector<std::vector<mpz_class>> a(nrows, std::vector<mpz_class>(ncols));
    for (int r = 0; r < nrows; ++r)
        for (int c = 0; c < ncols; ++c) a[r][c] = rows_a[r][c];
    std::vector<std::vector<mpz_class>> u(ncols, std::vector<mpz_class>(ncols, 0));
    for (int i = 0; i < ncols; ++i) u[i][i] = 1;

    auto col_sub = [&](int dst, int src, const mpz_class& f) {
        for (int r = 0; r < nrows; ++r) a[r][dst] -= f * a[r][src];
        for (int r = 0; r < ncols; ++r) u[r][dst] -= f * u[r][src];
    };
    auto col_swap = [&](int c1, int c2) {
        for (int r = 0; r < nrows; ++r) std::swap(a[r][c1], a[r][c2]);
        for (int r = 0; r < ncols; ++r) std::swap(u[r][c1], u[r][c2]);
    };

    int rank = 0;
    for (int row = 0; row < nrows && rank < ncols; ++row) {
        while (true) {
            int pivot = -1;
            for (int c = rank; c < ncols; ++c)
                if (a[row][c] != 0 && (pivot < 0 || abs(a[row][c]) < abs(a[row][pivot])))
                    pivot = c;
            if (pivot < 0) break;
            col_swap(rank, pivot);
            bool clean = true;
            for (int c = rank + 1; c < ncols; ++c) {
                if (a[row][c] == 0) continue;
                mpz_class f = a[row][c] / a[row][rank];
                col_sub(c, rank, f);
                if (a[row][c] != 0) clean = false;
            }
            if (clean) {
                ++rank;
                break;
            }
        }
    }

    std::vector<std::vector<long>> basis;
    for (int c = rank; c < ncols; ++c) {
        std::vector<long> v(ncols);
        bool nonzero = false;
        for (int r = 0; r < ncols; ++r) {
            if (!u[r][c].fits_slong_p()) throw std::overflow_error("kernel basis entry overflow");
            v[r] = u[r][c].get_si();
            nonzero |= v[r] != 0;
        }
        if (nonzero) basis.push_back(std::move(v));
    }
    return basis;
}

KernelLattice kernel_lattice(const ValidatedPolytope& vp) {
    const int n = vp.spec.n, d = vp.spec.d();
    KernelLattice kl;
    kl.n = n;
    kl.d = d;
    kl.proj.assign(n, std::vector<long>(d));
    for (int i = 0; i < d; ++i)
        for (int r = 0; r < n; ++r) kl.proj[r][i] = vp.spec.facets[i].normal[r];
    kl.basis = integer_kernel(kl.proj, d);
    if (static_cast<int>(kl.basis.size()) != d - n)
        throw std::logic_error("kernel rank mismatch");

    for (const auto& g : kl.basis) {
        long s = 0;
        Rat h(0);
        for (int i = 0; i < d; ++i) {
            s += g[i];
            h += vp.spec.facets[i].offset * g[i];
        }
        kl.g_basis.push_back(2 * s);
        kl.h_basis.push_back(h);
    }

    // im h_G is discrete iff h is a rational multiple of g on J; then
    // im h_G = 2c * Z for h = c * g, and the value group is (1/den)Z.
    Rat c(0);
    bool have_c = false;
    kl.h_discrete = true;
    for (size_t k = 0; k < kl.basis.size(); ++k) {
        if (kl.g_basis[k] == 0) {
            if (kl.h_basis[k] != 0) kl.h_discrete = false;
            continue;
        }
        Rat ck = kl.h_basis[k] / kl.g_basis[k];
        if (!have_c) {
            c = ck;
            have_c = true;
        } else if (ck != c) {
            kl.h_discrete = false;
        }
    }
    if (kl.h_discrete && have_c && c != 0) {
        Rat step = 2 * c;
        kl.value_denominator = step.get_den().get_si();
    } else {
        kl.value_denominator = 1;
    }
    return kl;
}

std::optional<std::vector<long>> in_kernel_coords(const KernelLattice& kl,
                                                  const std::vector<long>& u) {
    const int r = kl.rank();
    if (r == 0) return std::nullopt;
    // Solve basis^T x = u by least-squares-free exact elimination on the d x r system.
    std::vector<std::vector<Rat>> a(kl.d, std::vector<Rat>(r));
    for (int i = 0; i < kl.d; ++i)
        for (int k = 0; k < r; ++k) a[i][k] = Rat(kl.basis[k][i]);
    std::vector<Rat> b(u.begin(), u.end());
    // Gaussian elimination with full row set; consistency check at the end.
    std::vector<int> pivot_row(r, -1);
    int row = 0;
    for (int col = 0; col < r && row < kl.d; ++col) {
        int p = -1;
        for (int i = row; i < kl.d; ++i)
            if (a[i][col] != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(a[p], a[row]);
        std::swap(b[p], b[row]);
        for (int i = 0; i < kl.d; ++i) {
            if (i == row || a[i][col] == 0) continue;
            Rat f = a[i][col] / a[row][col];
            for (int k = col; k < r; ++k) a[i][k] -= f * a[row][k];
            b[i] -= f * b[row];
        }
        pivot_row[col] = row;
        ++row;
    }
    std::vector<Rat> x(r, Rat(0));
    for (int col = 0; col < r; ++col) {
        if (pivot_row[col] < 0) return std::nullopt;
        x[col] = b[pivot_row[col]] / a[pivot_row[col]][col];
    }
    // Consistency on the remaining rows.
    for (int i = 0; i < kl.d; ++i) {
        Rat lhs(0);
        bool is_pivot = false;
        for (int col = 0; col < r; ++col) {
            lhs += a[i][col] * x[col];
            if (pivot_row[col] == i) is_pivot = true;
        }
        if (!is_pivot && lhs != b[i]) return std::nullopt;
    }
    std::vector<long> xi(r);
    for (int k = 0; k < r; ++k) {
        if (!rat_is_int(x[k])) return std::nullopt;
        xi[k] = rat_long(x[k]);
    }
    return xi;
}

namespace {

int q_raw(const std::vector<std::vector<int>>& eps, const std::vector<long>& beta) {
    const int d = static_cast<int>(beta.size());
    int acc = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) acc += eps[i][j] * static_cast<int>(((beta[i] % 2) + 2) % 2) *
                                           static_cast<int>(((beta[j] % 2) + 2) % 2);
    return acc & 1;
}

std::vector<long> embed(const KernelLattice& kl, const std::vector<long>& j_coords) {
    std::vector<long> u(kl.d, 0);
    for (int k = 0; k < kl.rank(); ++k)
        for (int i = 0; i < kl.d; ++i) u[i] += j_coords[k] * kl.basis[k][i];
    return u;
}

}  // namespace

int q_of(const SpinData& sd, const KernelLattice& kl, const std::vector<long>& j_coords) {
    return q_raw(sd.eps_q, embed(kl, j_coords));
}

int bilinear_of(const SpinData& sd, const KernelLattice& kl, const std::vector<long>& a,
                const std::vector<long>& b) {
    auto ua = embed(kl, a), ub = embed(kl, b);
    int acc = 0;
    for (int i = 0; i < kl.d; ++i)
        for (int j = 0; j < kl.d; ++j)
            if (i != j) acc += sd.eps_q[i][j] * static_cast<int>(((ua[i] % 2) + 2) % 2) *
                               static_cast<int>(((ub[j] % 2) + 2) % 2);
    return acc & 1;
}

int sigma_of(const SpinData& sd, const std::vector<long>& j_coords) {
    int acc = 0;
    for (size_t k = 0; k < j_coords.size(); ++k)
        acc += sd.sigma_basis[k] * static_cast<int>(((j_coords[k] % 2) + 2) % 2);
    return acc & 1;
}

SpinData spin_analysis(const KernelLattice& kl, bool is_one_simplex) {
    const int d = kl.d;
    SpinData sd;
    sd.eps_q.assign(d, std::vector<int>(d, 1));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;  // 2 f_i is never in J (normals are nonzero)
            bool opposite = true;
            for (int r = 0; r < kl.n; ++r)
                if (kl.proj[r][i] + kl.proj[r][j] != 0) opposite = false;
            if (opposite) sd.eps_q[i][j] = 0;
        }
    }

    const int r = kl.rank();
    for (int k = 0; k < r; ++k) {
        std::vector<long> unit(r, 0);
        unit[k] = 1;
        sd.q_basis.push_back(q_of(sd, kl, unit));
    }

    sd.orientable = true;
    for (long g : kl.g_basis)
        if (g % 4 != 0) sd.orientable = false;

    sd.pin = true;
    for (int a = 0; a < r && sd.pin; ++a) {
        for (int b = a; b < r && sd.pin; ++b) {
            std::vector<long> sum(r, 0);
            sum[a] += 1;
            sum[b] += 1;
            if (q_of(sd, kl, sum) != ((sd.q_basis[a] + sd.q_basis[b]) & 1)) sd.pin = false;
        }
    }
    sd.spin = sd.orientable && sd.pin;

    if (!sd.spin) {
        sd.sigma_basis.assign(r, 0);
    } else if (is_one_simplex) {
        sd.sigma_basis.assign(r, 1);  // the non-trivial background class of the segment
    } else {
        sd.sigma_basis = sd.q_basis;
    }
    sd.sigma_prime_basis.assign(r, 0);
    for (int k = 0; k < r; ++k) sd.sigma_prime_basis[k] = (sd.sigma_basis[k] ^ sd.q_basis[k]) & 1;

    // Freeness of sigma' per its defining quadratic expression: evaluate
    // sigma'(f_i+f_j) on the pairs with f_i+f_j in J and compare on all of J mod 2.
    std::vector<std::pair<std::pair<int, int>, int>> pair_vals;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            if (sd.eps_q[i][j] != 0) continue;
            std::vector<long> u(d, 0);
            u[i] = 1;
            u[j] = 1;
            auto coords = in_kernel_coords(kl, u);
            if (!coords) continue;
            int sp = 0;
            for (int k = 0; k < r; ++k)
                sp += sd.sigma_prime_basis[k] * static_cast<int>((((*coords)[k] % 2) + 2) % 2);
            pair_vals.push_back({{i, j}, sp & 1});
        }
    }
    sd.sigma_prime_free = true;
    for (long mask = 0; mask < (1L << r) && sd.sigma_prime_free; ++mask) {
        std::vector<long> coords(r);
        for (int k = 0; k < r; ++k) coords[k] = (mask >> k) & 1;
        auto u = embed(kl, coords);
        int lhs = 0;
        for (int k = 0; k < r; ++k) lhs += sd.sigma_prime_basis[k] * static_cast<int>(coords[k]);
        int rhs = 0;
        for (const auto& [ij, val] : pair_vals)
            rhs += val * static_cast<int>(((u[ij.first] % 2) + 2) % 2) *
                   static_cast<int>(((u[ij.second] % 2) + 2) % 2);
        if (((lhs ^ rhs) & 1) != 0) sd.sigma_prime_free = false;
    }
    return sd;
}

SpinStructure spin_structures(const SpinData& sd, const KernelLattice& kl) {
    if (!sd.spin) throw NotSpin();
    SpinStructure st;
    st.s_basis.assign(kl.rank(), 0);
    st.orbit_size = 1L << kl.rank();
    return st;
}

}  // namespace tmf
