#include "oracles.hpp"

#include <openssl/evp.h>
#include <sodium.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace oracle {

Bytes hex(const std::string& text) {
    Bytes out;
    std::string digits;
    for (char c : text)
        if (std::isxdigit(static_cast<unsigned char>(c))) digits.push_back(c);
    for (std::size_t i = 0; i + 1 < digits.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>(std::stoul(digits.substr(i, 2), nullptr, 16)));
    return out;
}

// ---- P-224 ----

const mpz_class& prime() {
    static const mpz_class p("ffffffffffffffffffffffffffffffff000000000000000000000001", 16);
    return p;
}
const mpz_class& order() {
    static const mpz_class n("ffffffffffffffffffffffffffff16a2e0b8f03e13dd29455c5c2a3d", 16);
    return n;
}
const mpz_class& coeff_b() {
    static const mpz_class b("b4050a850c04b3abf54132565044b0b7d7bfd8ba270b39432355ffb4", 16);
    return b;
}
const Point& generator() {
    static const Point g{mpz_class("b70e0cbd6bb4bf7f321390b94a03c1d356c21122343280d6115c1d21", 16),
                         mpz_class("bd376388b5f723fb4c22dfe6cd4375a05a07476444d5819985007e34", 16), false};
    return g;
}

namespace {

mpz_class mod(const mpz_class& v, const mpz_class& m) {
    mpz_class r = v % m;
    if (r < 0) r += m;
    return r;
}

mpz_class inverse(const mpz_class& v, const mpz_class& m) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), mod(v, m).get_mpz_t(), m.get_mpz_t()) == 0) throw std::domain_error("no inverse");
    return r;
}

mpz_class powm(const mpz_class& b, const mpz_class& e, const mpz_class& m) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

}  // namespace

mpz_class from_bytes(const std::uint8_t* data, std::size_t n) {
    mpz_class v;
    mpz_import(v.get_mpz_t(), n, 1, 1, 1, 0, data);
    return v;
}

Bytes to_bytes(const mpz_class& v, std::size_t n) {
    Bytes out(n, 0);
    std::size_t count = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    if (v == 0) return out;
    if (count > n) throw std::length_error("value too wide");
    mpz_export(out.data() + (n - count), nullptr, 1, 1, 1, 0, v.get_mpz_t());
    return out;
}

bool on_curve(const Point& pt) {
    if (pt.infinity) return true;
    const auto& p = prime();
    return mod(pt.y * pt.y - (pt.x * pt.x * pt.x - 3 * pt.x + coeff_b()), p) == 0;
}

Point add(const Point& a, const Point& b) {
    const auto& p = prime();
    if (a.infinity) return b;
    if (b.infinity) return a;
    mpz_class lambda;
    if (a.x == b.x) {
        if (mod(a.y + b.y, p) == 0) return {0, 0, true};
        lambda = mod((3 * a.x * a.x - 3) * inverse(2 * a.y, p), p);
    } else {
        lambda = mod((b.y - a.y) * inverse(b.x - a.x, p), p);
    }
    mpz_class x = mod(lambda * lambda - a.x - b.x, p);
    mpz_class y = mod(lambda * (a.x - x) - a.y, p);
    return {x, y, false};
}

Point mul(const mpz_class& k, const Point& pt) {
    Point acc{0, 0, true};
    Point run = pt;
    mpz_class e = mod(k, order());
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) acc = add(acc, run);
        run = add(run, run);
        e >>= 1;
    }
    return acc;
}

Point mul_base(const mpz_class& k) {
    static const std::vector<Point> table = [] {
        std::vector<Point> t{generator()};
        for (int i = 1; i < 224; ++i) t.push_back(add(t.back(), t.back()));
        return t;
    }();
    Point acc{0, 0, true};
    mpz_class e = mod(k, order());
    for (int i = 0; i < 224 && e > 0; ++i, e >>= 1)
        if (mpz_odd_p(e.get_mpz_t())) acc = add(acc, table[i]);
    return acc;
}

std::optional<mpz_class> sqrt_mod_p(const mpz_class& v) {
    const auto& p = prime();
    mpz_class a = mod(v, p);
    if (a == 0) return mpz_class(0);
    if (powm(a, (p - 1) / 2, p) != 1) return std::nullopt;

    mpz_class q = p - 1;
    unsigned long s = 0;
    while (mpz_even_p(q.get_mpz_t())) {
        q >>= 1;
        ++s;
    }
    mpz_class z = 2;
    while (powm(z, (p - 1) / 2, p) != p - 1) ++z;

    mpz_class c = powm(z, q, p);
    mpz_class r = powm(a, (q + 1) / 2, p);
    mpz_class t = powm(a, q, p);
    unsigned long m = s;
    while (t != 1) {
        unsigned long i = 0;
        mpz_class tt = t;
        while (tt != 1) {
            tt = mod(tt * tt, p);
            ++i;
        }
        mpz_class b = c;
        for (unsigned long j = 0; j + 1 < m - i; ++j) b = mod(b * b, p);
        r = mod(r * b, p);
        c = mod(b * b, p);
        t = mod(t * c, p);
        m = i;
    }
    return r;
}

std::optional<Point> lift_x(const mpz_class& x, bool odd_y) {
    const auto& p = prime();
    if (x < 0 || x >= p) return std::nullopt;
    auto y = sqrt_mod_p(x * x * x - 3 * x + coeff_b());
    if (!y) return std::nullopt;
    mpz_class yy = *y;
    if (static_cast<bool>(mpz_odd_p(yy.get_mpz_t())) != odd_y) yy = mod(p - yy, p);
    return Point{x, yy, false};
}

// ---- hashing ----

Bytes sha256(const Bytes& data) {
    Bytes out(crypto_hash_sha256_BYTES);
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Bytes x963_kdf(const Bytes& z, const Bytes& info, std::size_t length) {
    Bytes out;
    for (std::uint32_t counter = 1; out.size() < length; ++counter) {
        Bytes block = z;
        for (int shift = 24; shift >= 0; shift -= 8) block.push_back(static_cast<std::uint8_t>(counter >> shift));
        block.insert(block.end(), info.begin(), info.end());
        Bytes h = sha256(block);
        out.insert(out.end(), h.begin(), h.end());
    }
    out.resize(length);
    return out;
}

// ---- key chain ----

namespace {

Bytes ascii(const char* s) { return Bytes(s, s + std::char_traits<char>::length(s)); }

mpz_class to_nonzero_scalar(const std::uint8_t* data, std::size_t n) {
    return mod(from_bytes(data, n), order() - 1) + 1;
}

}  // namespace

std::vector<KeyOracle> key_chain(const Bytes& d0_bytes, const Bytes& sk0, std::uint64_t count) {
    const mpz_class d0 = from_bytes(d0_bytes.data(), d0_bytes.size());
    std::vector<KeyOracle> out;
    Bytes sk = sk0;
    for (std::uint64_t i = 1; i <= count; ++i) {
        sk = x963_kdf(sk, ascii("update"), 32);
        Bytes uv = x963_kdf(sk, ascii("diversify"), 72);
        mpz_class u = to_nonzero_scalar(uv.data(), 36);
        mpz_class v = to_nonzero_scalar(uv.data() + 36, 36);
        mpz_class d = mod(d0 * u + v, order());
        Point pt = mul_base(d);
        Bytes x = to_bytes(pt.x, 28);
        out.push_back({i, to_bytes(d, 28), x, sha256(x)});
    }
    return out;
}

// ---- GCM ----

namespace {

using Block = std::array<std::uint8_t, 16>;

Block aes_block(const Bytes& key, const Block& in) {
    Block out{};
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    int len = 0;
    EVP_EncryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, key.data(), nullptr);
    EVP_CIPHER_CTX_set_padding(ctx, 0);
    EVP_EncryptUpdate(ctx, out.data(), &len, in.data(), 16);
    EVP_CIPHER_CTX_free(ctx);
    return out;
}

// Multiplication in GF(2^128) with the GCM bit order (bit 0 is the MSB of byte 0).
Block gf_mul(const Block& x, const Block& y) {
    Block z{};
    Block v = y;
    for (int i = 0; i < 128; ++i) {
        if ((x[i / 8] >> (7 - i % 8)) & 1)
            for (int k = 0; k < 16; ++k) z[k] ^= v[k];
        bool lsb = v[15] & 1;
        for (int k = 15; k > 0; --k) v[k] = static_cast<std::uint8_t>((v[k] >> 1) | (v[k - 1] << 7));
        v[0] >>= 1;
        if (lsb) v[0] ^= 0xE1;
    }
    return z;
}

Block ghash(const Block& h, const Bytes& data) {
    Block y{};
    for (std::size_t off = 0; off < data.size(); off += 16) {
        for (std::size_t k = 0; k < 16 && off + k < data.size(); ++k) y[k] ^= data[off + k];
        y = gf_mul(y, h);
    }
    return y;
}

void put_len64(Bytes& out, std::uint64_t bits) {
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(bits >> shift));
}

void pad16(Bytes& b) {
    while (b.size() % 16) b.push_back(0);
}

struct GcmCore {
    Bytes output;
    Bytes tag;  // over the ciphertext side
};

GcmCore gcm(const Bytes& key, const Bytes& iv, const Bytes& input, bool encrypting) {
    Block h = aes_block(key, Block{});
    Block j0{};
    if (iv.size() == 12) {
        std::copy(iv.begin(), iv.end(), j0.begin());
        j0[15] = 1;
    } else {
        Bytes j0_input = iv;
        pad16(j0_input);
        put_len64(j0_input, 0);
        put_len64(j0_input, iv.size() * 8);
        j0 = ghash(h, j0_input);
    }

    Block counter = j0;
    Bytes out(input.size());
    for (std::size_t off = 0; off < input.size(); off += 16) {
        for (int k = 15; k >= 12; --k)
            if (++counter[k] != 0) break;
        Block ks = aes_block(key, counter);
        for (std::size_t k = 0; k < 16 && off + k < input.size(); ++k) out[off + k] = input[off + k] ^ ks[k];
    }

    Bytes s_input = encrypting ? out : input;
    pad16(s_input);
    put_len64(s_input, 0);
    put_len64(s_input, (encrypting ? out.size() : input.size()) * 8);
    Block s = ghash(h, s_input);
    Block ek = aes_block(key, j0);
    Bytes tag(16);
    for (int k = 0; k < 16; ++k) tag[k] = s[k] ^ ek[k];
    return {out, tag};
}

}  // namespace

GcmOutput gcm_encrypt(const Bytes& key, const Bytes& iv, const Bytes& plaintext) {
    auto r = gcm(key, iv, plaintext, true);
    return {r.output, r.tag};
}

// ---- ECIES ----

Bytes ecies_encrypt(const Bytes& advertised_x, const mpz_class& k, std::uint32_t timestamp, std::uint8_t confidence,
                    const Bytes& location10) {
    auto p = lift_x(from_bytes(advertised_x.data(), advertised_x.size()), false);
    if (!p) throw std::invalid_argument("x is not on the curve");
    Point e = mul_base(k);
    Point shared = mul(k, *p);
    Bytes kdf = x963_kdf(to_bytes(shared.x, 28), advertised_x, 32);
    Bytes key(kdf.begin(), kdf.begin() + 16), iv(kdf.begin() + 16, kdf.end());
    auto sealed = gcm_encrypt(key, iv, location10);

    Bytes out;
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(timestamp >> shift));
    out.push_back(confidence);
    out.push_back(0x04);
    Bytes ex = to_bytes(e.x, 28), ey = to_bytes(e.y, 28);
    out.insert(out.end(), ex.begin(), ex.end());
    out.insert(out.end(), ey.begin(), ey.end());
    out.insert(out.end(), sealed.ciphertext.begin(), sealed.ciphertext.end());
    out.insert(out.end(), sealed.tag.begin(), sealed.tag.end());
    return out;
}

std::optional<Bytes> ecies_decrypt(const Bytes& d_bytes, const Bytes& report) {
    if (report.size() != 88 || report[5] != 0x04) return std::nullopt;
    Point e{from_bytes(report.data() + 6, 28), from_bytes(report.data() + 34, 28), false};
    if (e.x >= prime() || e.y >= prime() || !on_curve(e)) return std::nullopt;
    mpz_class d = from_bytes(d_bytes.data(), d_bytes.size());
    Bytes advertised_x = to_bytes(mul_base(d).x, 28);
    Point shared = mul(d, e);
    if (shared.infinity) return std::nullopt;
    Bytes kdf = x963_kdf(to_bytes(shared.x, 28), advertised_x, 32);
    Bytes key(kdf.begin(), kdf.begin() + 16), iv(kdf.begin() + 16, kdf.end());
    Bytes ct(report.begin() + 62, report.begin() + 72);
    Bytes tag(report.begin() + 72, report.end());
    auto r = gcm(key, iv, ct, false);
    unsigned diff = 0;
    for (int i = 0; i < 16; ++i) diff |= r.tag[i] ^ tag[i];
    if (diff) return std::nullopt;
    return r.output;
}

// ---- geodesics ----

namespace {

constexpr double kA = 6378137.0;
constexpr double kF = 1.0 / 298.257223563;
constexpr double kE2 = kF * (2 - kF);

struct State {
    double phi, lambda, alpha;
};

State derivative(const State& s) {
    double sp = std::sin(s.phi), cp = std::cos(s.phi);
    double w = std::sqrt(1 - kE2 * sp * sp);
    double m = kA * (1 - kE2) / (w * w * w);
    double n = kA / w;
    return {std::cos(s.alpha) / m, std::sin(s.alpha) / (n * cp), std::sin(s.alpha) * sp / (cp * n)};
}

State axpy(const State& s, double h, const State& d) {
    return {s.phi + h * d.phi, s.lambda + h * d.lambda, s.alpha + h * d.alpha};
}

}  // namespace

Destination geodesic_direct(double lat1, double lon1, double azimuth_deg, double distance_m, int steps) {
    const double deg = std::numbers::pi / 180.0;
    State s{lat1 * deg, lon1 * deg, azimuth_deg * deg};
    const double h = distance_m / steps;
    for (int i = 0; i < steps; ++i) {
        State k1 = derivative(s);
        State k2 = derivative(axpy(s, h / 2, k1));
        State k3 = derivative(axpy(s, h / 2, k2));
        State k4 = derivative(axpy(s, h, k3));
        s.phi += h / 6 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
        s.lambda += h / 6 * (k1.lambda + 2 * k2.lambda + 2 * k3.lambda + k4.lambda);
        s.alpha += h / 6 * (k1.alpha + 2 * k2.alpha + 2 * k3.alpha + k4.alpha);
    }
    double lon = std::remainder(s.lambda / deg, 360.0);
    return {s.phi / deg, lon};
}

// ---- DBSCAN ----

std::vector<int> dbscan(const std::vector<std::array<double, 2>>& pts, double radius_m, std::size_t min_neighbors,
                        double (*dist)(double, double, double, double)) {
    const std::size_t n = pts.size();
    std::vector<std::vector<bool>> near(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            near[i][j] = i == j || dist(pts[i][0], pts[i][1], pts[j][0], pts[j][1]) <= radius_m;

    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j) count += near[i][j];
        core[i] = count >= min_neighbors;
    }

    // Components of the core-core adjacency graph.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (core[i] && core[j] && near[i][j]) parent[find(i)] = find(j);

    std::vector<int> label(n, -1);
    std::vector<int> component_id(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        std::size_t root = find(i);
        if (component_id[root] < 0) component_id[root] = next++;
        label[i] = component_id[root];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        int best = -1;
        for (std::size_t j = 0; j < n; ++j)
            if (core[j] && near[i][j] && (best < 0 || label[j] < best)) best = label[j];
        label[i] = best;
    }
    return label;
}

}  // namespace oracle
