#include "ofnet/p224.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <memory>

#include "ofnet/error.hpp"

namespace ofnet::p224 {
namespace {

struct BnFree {
    void operator()(BIGNUM* p) const { BN_clear_free(p); }
};
struct CtxFree {
    void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct GroupFree {
    void operator()(EC_GROUP* p) const { EC_GROUP_free(p); }
};
struct PointFree {
    void operator()(EC_POINT* p) const { EC_POINT_clear_free(p); }
};

using BnPtr = std::unique_ptr<BIGNUM, BnFree>;
using CtxPtr = std::unique_ptr<BN_CTX, CtxFree>;
using GroupPtr = std::unique_ptr<EC_GROUP, GroupFree>;
using PointPtr = std::unique_ptr<EC_POINT, PointFree>;

[[noreturn]] void openssl_failure(const char* what) { throw Error(std::string("OpenSSL failure: ") + what); }

template <typename T>
T check(T ptr, const char* what) {
    if (!ptr) openssl_failure(what);
    return ptr;
}

// One group and context per thread; OpenSSL objects are not shared across threads.
struct Curve {
    GroupPtr group{check(EC_GROUP_new_by_curve_name(NID_secp224r1), "EC_GROUP_new_by_curve_name")};
    CtxPtr ctx{check(BN_CTX_new(), "BN_CTX_new")};
    BnPtr order{check(BN_new(), "BN_new")};
    BnPtr order_minus_one{check(BN_new(), "BN_new")};
    BnPtr prime{check(BN_new(), "BN_new")};

    Curve() {
        if (!EC_GROUP_get_order(group.get(), order.get(), ctx.get())) openssl_failure("EC_GROUP_get_order");
        if (!BN_copy(order_minus_one.get(), order.get()) || !BN_sub_word(order_minus_one.get(), 1))
            openssl_failure("BN_sub_word");
        if (!EC_GROUP_get_curve(group.get(), prime.get(), nullptr, nullptr, ctx.get()))
            openssl_failure("EC_GROUP_get_curve");
    }
};

Curve& curve() {
    thread_local Curve c;
    return c;
}

BnPtr to_bn(ByteView bytes) {
    return BnPtr(check(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr), "BN_bin2bn"));
}

FieldBytes from_bn(const BIGNUM* bn) {
    FieldBytes out{};
    if (BN_bn2binpad(bn, out.data(), static_cast<int>(out.size())) < 0) openssl_failure("BN_bn2binpad");
    return out;
}

Point from_ec_point(const EC_POINT* p) {
    Curve& c = curve();
    if (EC_POINT_is_at_infinity(c.group.get(), p)) throw Error("unexpected point at infinity");
    BnPtr x(BN_new()), y(BN_new());
    if (!EC_POINT_get_affine_coordinates(c.group.get(), p, x.get(), y.get(), c.ctx.get()))
        openssl_failure("EC_POINT_get_affine_coordinates");
    return Point{from_bn(x.get()), from_bn(y.get())};
}

PointPtr to_ec_point(const Point& p) {
    Curve& c = curve();
    PointPtr out(check(EC_POINT_new(c.group.get()), "EC_POINT_new"));
    BnPtr x = to_bn(p.x), y = to_bn(p.y);
    if (!EC_POINT_set_affine_coordinates(c.group.get(), out.get(), x.get(), y.get(), c.ctx.get()) ||
        EC_POINT_is_on_curve(c.group.get(), out.get(), c.ctx.get()) != 1) {
        throw InvalidPublicKey("point is not on P-224");
    }
    return out;
}

}  // namespace

const CurveParams& CurveParams::get() {
    static const CurveParams params = [] {
        Curve& c = curve();
        CurveParams p;
        p.generator = from_ec_point(EC_GROUP_get0_generator(c.group.get()));
        p.order = from_bn(c.order.get());
        p.prime = from_bn(c.prime.get());
        return p;
    }();
    return params;
}

bool is_zero(const Scalar& s) {
    for (auto b : s.bytes)
        if (b != 0) return false;
    return true;
}

bool is_canonical(const Scalar& s) {
    const auto& q = CurveParams::get().order;
    return std::lexicographical_compare(s.bytes.begin(), s.bytes.end(), q.begin(), q.end());
}

Scalar reduce_nonzero(ByteView big_endian) {
    Curve& c = curve();
    BnPtr x = to_bn(big_endian);
    BnPtr r(BN_new());
    if (!BN_mod(r.get(), x.get(), c.order_minus_one.get(), c.ctx.get()) || !BN_add_word(r.get(), 1))
        openssl_failure("BN_mod");
    return Scalar{from_bn(r.get())};
}

Scalar mul_add(const Scalar& a, const Scalar& b, const Scalar& add) {
    Curve& c = curve();
    BnPtr x = to_bn(a.bytes), y = to_bn(b.bytes), z = to_bn(add.bytes);
    BnPtr r(BN_new());
    if (!BN_mod_mul(r.get(), x.get(), y.get(), c.order.get(), c.ctx.get()) ||
        !BN_mod_add(r.get(), r.get(), z.get(), c.order.get(), c.ctx.get()))
        openssl_failure("BN_mod_mul");
    return Scalar{from_bn(r.get())};
}

Scalar random_scalar(EntropySource& entropy) {
    Scalar s;
    do {
        entropy.fill(s.bytes);
    } while (is_zero(s) || !is_canonical(s));
    return s;
}

Point mul_base(const Scalar& k) {
    if (is_zero(k) || !is_canonical(k)) throw RangeError("scalar outside [1, q-1]");
    Curve& c = curve();
    BnPtr n = to_bn(k.bytes);
    PointPtr r(check(EC_POINT_new(c.group.get()), "EC_POINT_new"));
    if (!EC_POINT_mul(c.group.get(), r.get(), n.get(), nullptr, nullptr, c.ctx.get())) openssl_failure("EC_POINT_mul");
    return from_ec_point(r.get());
}

Point mul(const Scalar& k, const Point& p) {
    if (is_zero(k) || !is_canonical(k)) throw RangeError("scalar outside [1, q-1]");
    Curve& c = curve();
    PointPtr base = to_ec_point(p);
    BnPtr n = to_bn(k.bytes);
    PointPtr r(check(EC_POINT_new(c.group.get()), "EC_POINT_new"));
    if (!EC_POINT_mul(c.group.get(), r.get(), nullptr, base.get(), n.get(), c.ctx.get()))
        openssl_failure("EC_POINT_mul");
    return from_ec_point(r.get());
}

bool on_curve(const Point& p) {
    try {
        to_ec_point(p);
        return true;
    } catch (const InvalidPublicKey&) {
        return false;
    }
}

Point lift_x(const FieldBytes& x, bool odd_y) {
    Curve& c = curve();
    BnPtr bx = to_bn(x);
    if (BN_cmp(bx.get(), c.prime.get()) >= 0) throw InvalidPublicKey("x coordinate not below the field prime");
    PointPtr r(check(EC_POINT_new(c.group.get()), "EC_POINT_new"));
    if (!EC_POINT_set_compressed_coordinates(c.group.get(), r.get(), bx.get(), odd_y ? 1 : 0, c.ctx.get())) {
        throw InvalidPublicKey("x coordinate is not on P-224");
    }
    return from_ec_point(r.get());
}

ByteArray<kUncompressedBytes> encode_uncompressed(const Point& p) {
    ByteArray<kUncompressedBytes> out{};
    out[0] = 0x04;
    std::copy(p.x.begin(), p.x.end(), out.begin() + 1);
    std::copy(p.y.begin(), p.y.end(), out.begin() + 1 + kFieldBytes);
    return out;
}

Point decode_uncompressed(ByteView bytes) {
    if (bytes.size() != kUncompressedBytes || bytes[0] != 0x04) {
        throw InvalidPublicKey("expected a 57-byte uncompressed point");
    }
    Point p;
    std::copy_n(bytes.begin() + 1, kFieldBytes, p.x.begin());
    std::copy_n(bytes.begin() + 1 + kFieldBytes, kFieldBytes, p.y.begin());
    to_ec_point(p);
    return p;
}

}  // namespace ofnet::p224
