#pragma once

#include <cstdint>
#include <span>

#include "ofnet/bytes.hpp"
#include "ofnet/entropy.hpp"

/// NIST P-224 arithmetic used by the key chain and report encryption.
/// Scalars and coordinates travel as fixed-width big-endian byte arrays;
/// the OpenSSL objects behind them never leave the translation unit.
namespace ofnet::p224 {

inline constexpr std::size_t kFieldBytes = 28;
inline constexpr std::size_t kUncompressedBytes = 1 + 2 * kFieldBytes;

using FieldBytes = ByteArray<kFieldBytes>;

/// Big-endian integer modulo the group order q.
struct Scalar {
    FieldBytes bytes{};
    friend bool operator==(const Scalar&, const Scalar&) = default;
};

/// Affine point other than infinity.
struct Point {
    FieldBytes x{};
    FieldBytes y{};
    friend bool operator==(const Point&, const Point&) = default;
};

/// Curve identity: base point G and group order q.
struct CurveParams {
    Point generator;
    FieldBytes order;
    FieldBytes prime;

    static const CurveParams& get();
};

bool is_zero(const Scalar& s);
bool is_canonical(const Scalar& s);  // s < q

/// Big-endian bytes of arbitrary length mapped to (x mod (q-1)) + 1, always in [1, q-1].
Scalar reduce_nonzero(ByteView big_endian);

/// (a * b + c) mod q.
Scalar mul_add(const Scalar& a, const Scalar& b, const Scalar& c);

/// Uniform scalar in [1, q-1] by rejection sampling 28-byte draws.
Scalar random_scalar(EntropySource& entropy);

/// k * G. Throws RangeError for k = 0 or k >= q.
Point mul_base(const Scalar& k);

/// k * P. Throws InvalidPublicKey if P is not on the curve.
Point mul(const Scalar& k, const Point& p);

bool on_curve(const Point& p);

/// Point with the given X coordinate and requested Y parity.
/// Throws InvalidPublicKey if X is not the abscissa of a curve point.
Point lift_x(const FieldBytes& x, bool odd_y = false);

ByteArray<kUncompressedBytes> encode_uncompressed(const Point& p);

/// Throws InvalidPublicKey on a wrong prefix or an off-curve point.
Point decode_uncompressed(ByteView bytes);

}  // namespace ofnet::p224
