#include "semilin/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <variant>

#include "semilin/admissibility.hpp"
#include "semilin/errors.hpp"
#include "semilin/fit.hpp"
#include "semilin/indicator.hpp"
#include "semilin/inverse.hpp"
#include "semilin/probes.hpp"

namespace semilin {

namespace {

// ---------------------------------------------------------------- reading

// Typed access to one JSON object; remembers which keys were read so that
// finish() can reject the rest as unknown.
class Reader {
public:
    Reader(const Json& j, std::string path) : j_(&j), path_(std::move(path))
    {
        if (!j.is_object()) fail("expected an object");
    }

    bool has(const std::string& key) const { return j_->contains(key); }

    const Json& raw(const std::string& key)
    {
        used_.insert(key);
        if (!j_->contains(key)) fail("missing key '" + key + "'");
        return (*j_)[key];
    }

    double number(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_number()) fail("'" + key + "' must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail("'" + key + "' must be finite");
        return x;
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : mark(key, fallback); }

    double positive(const std::string& key)
    {
        const double x = number(key);
        if (!(x > 0)) fail("'" + key + "' must be positive");
        return x;
    }
    double positive(const std::string& key, double fallback) { return has(key) ? positive(key) : mark(key, fallback); }

    int integer(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
        return v.get<int>();
    }
    int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : mark(key, fallback); }

    bool boolean(const std::string& key, bool fallback)
    {
        if (!has(key)) return mark(key, fallback);
        const Json& v = raw(key);
        if (!v.is_boolean()) fail("'" + key + "' must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_string()) fail("'" + key + "' must be a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& fallback)
    {
        return has(key) ? string(key) : mark(key, fallback);
    }

    cplx complex(const std::string& key) { return toComplex(raw(key), key); }
    cplx complex(const std::string& key, cplx fallback) { return has(key) ? complex(key) : mark(key, fallback); }

    std::vector<double> numbers(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_array()) fail("'" + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) fail("'" + key + "' must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<cplx> complexes(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_array()) fail("'" + key + "' must be an array");
        std::vector<cplx> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(toComplex(v[i], key + "[" + std::to_string(i) + "]"));
        return out;
    }

    Vec2 vec2(const std::string& key)
    {
        const std::vector<double> v = numbers(key);
        if (v.size() != 2) fail("'" + key + "' must have two entries");
        return Vec2(v[0], v[1]);
    }
    Vec2 vec2(const std::string& key, const Vec2& fallback) { return has(key) ? vec2(key) : mark(key, fallback); }

    Vec3 vec3(const std::string& key)
    {
        const std::vector<double> v = numbers(key);
        if (v.size() != 3) fail("'" + key + "' must have three entries");
        return Vec3(v[0], v[1], v[2]);
    }

    Reader child(const std::string& key) { return Reader(raw(key), sub(key)); }

    std::vector<Reader> children(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_array()) fail("'" + key + "' must be an array");
        std::vector<Reader> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], sub(key) + "[" + std::to_string(i) + "]");
        return out;
    }

    std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    const std::string& path() const { return path_; }

    void finish() const
    {
        for (auto it = j_->begin(); it != j_->end(); ++it)
            if (!used_.count(it.key())) fail("unknown key '" + it.key() + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + msg);
    }

private:
    template <class T>
    T mark(const std::string& key, T value)
    {
        used_.insert(key);
        return value;
    }

    cplx toComplex(const Json& v, const std::string& key) const
    {
        if (v.is_number()) return v.get<double>();
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
            return {v[0].get<double>(), v[1].get<double>()};
        fail("'" + key + "' must be a number or a [re, im] pair");
    }

    const Json* j_;
    std::string path_;
    std::set<std::string> used_;
};

// Runs f and rewrites library validation errors as config errors at `path`.
template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    } catch (const Error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

ConvexPolygon readPolygon(Reader r)
{
    ConvexPolygon p;
    if (r.has("rectangle")) {
        const std::vector<double> v = r.numbers("rectangle");
        if (v.size() != 4) r.fail("'rectangle' needs [x0, y0, x1, y1]");
        p = guarded(r.path(), [&] { return ConvexPolygon::rectangle(v[0], v[1], v[2], v[3]); });
    } else if (r.has("vertices")) {
        std::vector<Vec2> pts;
        const Json& arr = r.raw("vertices");
        for (const auto& e : arr) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                r.fail("vertices must be [x, y] pairs");
            pts.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
        p = guarded(r.path(), [&] { return ConvexPolygon(pts); });
    } else {
        r.fail("a polygon needs 'rectangle' or 'vertices'");
    }
    r.finish();
    return p;
}

std::vector<ConvexPolygon> readPolygons(Reader& r, const std::string& key)
{
    std::vector<ConvexPolygon> out;
    const Json& arr = r.raw(key);
    if (!arr.is_array()) r.fail("'" + key + "' must be an array of polygons");
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(readPolygon(Reader(arr[i], r.sub(key) + "[" + std::to_string(i) + "]")));
    return out;
}

ContentClass readClass(Reader& r, const std::string& key, ContentClass fallback)
{
    if (!r.has(key)) return fallback;
    const std::string s = r.string(key);
    if (s == "single") return ContentClass::singleLayer;
    if (s == "A") return ContentClass::classA;
    if (s == "B") return ContentClass::classB;
    r.fail("'" + key + "' must be \"single\", \"A\" or \"B\"");
}

std::string className(ContentClass c)
{
    switch (c) {
    case ContentClass::singleLayer: return "single";
    case ContentClass::classA: return "A";
    case ContentClass::classB: return "B";
    }
    return "?";
}

ContentModel readContent(Reader r)
{
    ContentModel c;
    c.backgroundLambda = r.complex("background");
    const Json& layers = r.raw("layers");
    if (!layers.is_array()) r.fail("'layers' must be an array of coefficient arrays");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Json wrap = {{"c", layers[l]}};
        Reader lr(wrap, r.sub("layers") + "[" + std::to_string(l) + "]");
        c.layers.push_back(lr.complexes("c"));
    }
    c.classTag = readClass(r, "class", ContentClass::singleLayer);
    r.finish();
    guarded(r.path(), [&] {
        c.validate();
        return 0;
    });
    return c;
}

struct BoundarySpec {
    std::string type = "zero";
    cplx amplitude = 1.0;
    double k = 0.0;
    Vec2 direction = Vec2(1.0, 0.0);

    BoundaryFunction function() const
    {
        if (type == "zero") return [](const Vec2&) { return cplx(0.0); };
        if (type == "constant") return [a = amplitude](const Vec2&) { return a; };
        const Vec2 d = direction.normalized();
        return [a = amplitude, k = k, d](const Vec2& x) { return a * std::exp(cplx(0.0, k * d.dot(x))); };
    }
};

BoundarySpec readBoundary(Reader r)
{
    BoundarySpec b;
    b.type = r.string("type");
    if (b.type == "planeWave") {
        b.amplitude = r.complex("amplitude", 1.0);
        b.k = r.number("k");
        b.direction = r.vec2("direction");
        if (b.direction.norm() == 0) r.fail("'direction' must be nonzero");
    } else if (b.type == "constant") {
        b.amplitude = r.complex("value");
    } else if (b.type != "zero") {
        r.fail("unknown boundary data type '" + b.type + "' (planeWave, constant, zero)");
    }
    r.finish();
    return b;
}

std::vector<BoundarySpec> readBoundaries(Reader& r, const std::string& key)
{
    std::vector<BoundarySpec> out;
    for (Reader m : r.children(key)) out.push_back(readBoundary(m));
    if (out.empty()) r.fail("'" + key + "' must not be empty");
    return out;
}

NewtonOptions readNewton(Reader& r)
{
    NewtonOptions n;
    if (!r.has("newton")) return n;
    Reader c = r.child("newton");
    n.tol = c.positive("tol", n.tol);
    n.maxIter = c.integer("max_iter", n.maxIter);
    if (n.maxIter < 1) c.fail("'max_iter' must be at least 1");
    if (c.has("smallness_delta")) n.smallnessDelta = c.positive("smallness_delta");
    c.finish();
    return n;
}

std::vector<double> readTaus(Reader r)
{
    const double lo = r.positive("min"), hi = r.positive("max");
    const int n = r.integer("count");
    if (!(hi > lo)) r.fail("'max' must exceed 'min'");
    if (n < 5) r.fail("'count' must be at least 5");
    r.finish();
    return logspace(lo, hi, n);
}

TruncatedCorner readCorner(Reader r)
{
    const int dim = r.integer("dim", 2);
    TruncatedCorner c;
    if (dim == 2) {
        const Vec2 apex = r.vec2("apex", Vec2::Zero());
        const Vec2 axis = r.vec2("axis", Vec2(1.0, 0.0));
        const double half = r.positive("half_angle");
        const double h = r.positive("radius");
        c = guarded(r.path(), [&] { return TruncatedCorner::sector(apex, axis, half, h); });
    } else if (dim == 3) {
        const Vec3 apex = r.has("apex") ? r.vec3("apex") : Vec3::Zero();
        const Vec3 axis = r.has("axis") ? r.vec3("axis") : Vec3::UnitX();
        const double half = r.positive("half_angle");
        const double h = r.positive("radius");
        c = guarded(r.path(), [&] { return TruncatedCorner::circularCone(apex, axis, half, h); });
    } else {
        r.fail("'dim' must be 2 or 3");
    }
    r.finish();
    guarded(r.path(), [&] {
        c.validate();
        return 0;
    });
    return c;
}

void requireNested(Reader& r, const ConvexPolygon& domain, const std::vector<ConvexPolygon>& layers)
{
    std::vector<ConvexPolygon> all{domain};
    all.insert(all.end(), layers.begin(), layers.end());
    const NestReport rep = validateNest(NestedPartition{all});
    if (!rep.pass) {
        std::string msg = "layers must be strictly nested inside the domain";
        if (!rep.messages.empty()) msg += ": " + rep.messages.front();
        r.fail(msg);
    }
}

std::vector<CoefficientSlot> readSlots(Reader& r, const std::string& key)
{
    std::vector<CoefficientSlot> slots;
    for (Reader s : r.children(key)) {
        CoefficientSlot c;
        c.layer = s.integer("layer");
        c.power = s.integer("power");
        if (c.layer < 1 || c.power < 1) s.fail("'layer' and 'power' start at 1");
        s.finish();
        slots.push_back(c);
    }
    if (slots.empty()) r.fail("'" + key + "' must not be empty");
    return slots;
}

void checkSlots(Reader& r, const std::vector<CoefficientSlot>& slots, const ContentModel& c)
{
    for (const auto& s : slots)
        if (static_cast<std::size_t>(s.layer) > c.layers.size() ||
            static_cast<std::size_t>(s.power) > c.layers[static_cast<std::size_t>(s.layer - 1)].size())
            r.fail("slot (layer " + std::to_string(s.layer) + ", power " + std::to_string(s.power) +
                   ") is not a coefficient of the content");
}

Json complexJson(cplx z) { return Json::array({z.real(), z.imag()}); }

Json polygonJson(const ConvexPolygon& p)
{
    Json v = Json::array();
    for (const Vec2& x : p.vertices()) v.push_back({x.x(), x.y()});
    return v;
}

// Similarity perturbation of a polygon about its centroid, then optional
// random vertex jitter (a fraction of the centroid-to-vertex radius).
struct Perturbation {
    double scale = 1.0;
    Vec2 shift = Vec2::Zero();
    double rotation = 0.0;
    double jitter = 0.0;
};

Perturbation readPerturbation(Reader r)
{
    Perturbation p;
    p.scale = r.positive("scale", 1.0);
    p.shift = r.vec2("shift", Vec2::Zero());
    p.rotation = r.number("rotation", 0.0);
    p.jitter = r.number("jitter", 0.0);
    if (p.jitter < 0 || p.jitter >= 0.5) r.fail("'jitter' must lie in [0, 0.5)");
    r.finish();
    return p;
}

ConvexPolygon perturb(const ConvexPolygon& p, const Perturbation& q, std::mt19937_64& rng)
{
    const Vec2 c = p.centroid();
    Eigen::Matrix2d rot;
    rot << std::cos(q.rotation), -std::sin(q.rotation), std::sin(q.rotation), std::cos(q.rotation);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec2> pts;
    for (const Vec2& v : p.vertices()) {
        Vec2 x = c + q.shift + q.scale * rot * (v - c);
        if (q.jitter > 0) {
            const double r = q.jitter * (v - c).norm() * q.scale;
            x += r * Vec2(u(rng), u(rng)) / std::sqrt(2.0);
        }
        pts.push_back(x);
    }
    return ConvexPolygon(pts);
}

// An initial polygon is either given explicitly or as a perturbation of the truth.
struct InitialPolygon {
    std::variant<ConvexPolygon, Perturbation> spec;
};

InitialPolygon readInitial(Reader r)
{
    InitialPolygon out;
    if (r.has("perturb")) {
        out.spec = readPerturbation(r.child("perturb"));
    } else if (r.has("polygon")) {
        out.spec = readPolygon(r.child("polygon"));
    } else {
        r.fail("an initial guess needs 'perturb' or 'polygon'");
    }
    r.finish();
    return out;
}

ConvexPolygon resolve(const InitialPolygon& init, const ConvexPolygon& truth, std::mt19937_64& rng)
{
    if (const auto* p = std::get_if<ConvexPolygon>(&init.spec)) return *p;
    return perturb(truth, std::get<Perturbation>(init.spec), rng);
}

std::string csvNumber(double x)
{
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
    return os.str();
}

double worstVertexDistance(const ConvexPolygon& a, const ConvexPolygon& b)
{
    // Largest distance from a vertex of either polygon to the nearest vertex of the other.
    double worst = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const ConvexPolygon& p = pass == 0 ? a : b;
        const ConvexPolygon& q = pass == 0 ? b : a;
        for (const Vec2& v : p.vertices()) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2& w : q.vertices()) best = std::min(best, (v - w).norm());
            worst = std::max(worst, best);
        }
    }
    return worst;
}

// ---------------------------------------------------------------- setups

struct ForwardSetup {
    std::string mode;  // solve, smallData, convergence
    ConvexPolygon domain;
    std::vector<ConvexPolygon> layers;
    ContentModel content;
    BoundarySpec psi;
    double hMesh = 0.05;
    NewtonOptions newton;
    std::vector<double> eps;
    double spreadLimit = 2.0;
    int maxIterations = 8;
    int refinements = 3;
    cplx amplitude = 1.0;
    double expectedRate = 2.0, rateTol = 0.2;
};

struct SweepCheck {
    SweepQuantity quantity = SweepQuantity::cornerIntegral;
    double alpha = 0.0;
    bool slope = false;
    double slopeExpected = 0.0, slopeTol = 0.0;
    double rateTol = -1.0;         // relative tolerance on the rate zeta h; < 0 skips
    bool bounds = false;           // values never exceed the upper bounds
    double closedFormTol = -1.0;   // infinite-sector closed form vs quadrature; < 0 skips
    bool leading = false;
    double leadingMin = 0.0, leadingMax = 0.0;
};

struct CornerDecaySetup {
    TruncatedCorner corner;
    std::vector<double> taus;
    double relTol = 1e-10;
    std::vector<SweepCheck> sweeps;
};

struct ExtractionSetup {
    TruncatedCorner corner;
    std::vector<double> taus;
    double k = 1.0;
    Vec2 direction = Vec2(1.0, 0.0);
    cplx c = 1.0, b = 1.0;
    double alpha = 1.0;
    cplx flankGamma = 0.0;
    BoundaryMode mode = BoundaryMode::fullBoundary;
    double relTol = 1e-11;
    bool green = false;
    double greenRelTol = 1e-10, greenMax = 1e-8;
    bool limit = false;
    double limitRelTol = 0.02, orderTol = 0.3;
};

struct ShapeSetup {
    ConvexPolygon domain, truth;
    ContentModel content;
    std::vector<BoundarySpec> measurements;
    double dataH = 0.025, hMesh = 0.05;
    NewtonOptions newton;
    InitialPolygon initial;
    ShapeRecoveryOptions search;
    double vertexTolFactor = 2.0;
};

struct VandermondeSetup {
    std::vector<cplx> apex, coefficients;
    double tol = 1e-10;
};

struct BoundaryCoeffSetup {
    ConvexPolygon domain;
    std::vector<ConvexPolygon> nest;
    ContentModel content;
    std::vector<CoefficientSlot> slots;
    std::vector<BoundarySpec> measurements;
    double dataH = 0.025, hMesh = 0.05;
    NewtonOptions newton;
    double initialScale = 0.8;
    double relTol = 0.01;
    CoefficientFitOptions fit;
};

struct CoeffSetup {
    std::optional<VandermondeSetup> vandermonde;
    std::optional<BoundaryCoeffSetup> boundary;
};

struct NestSetup {
    ConvexPolygon domain;
    std::vector<ConvexPolygon> truth;
    ContentModel content;
    std::vector<BoundarySpec> measurements;
    double dataH = 0.0125, hMesh = 0.025;
    NewtonOptions newton;
    std::vector<InitialPolygon> initial;
    double initialContentScale = 0.8;
    std::vector<CoefficientSlot> slots;
    NestRecoveryOptions options;
    double interfaceTolFactor = 2.0;
    double lambdaRelTol = 0.02;
};

struct AdmissibilitySetup {
    std::string mode;  // check, leadingOrder, expansion
    AssumptionKind assumption = AssumptionKind::A;
    AdmissibilityConfig config;
    std::vector<BoundarySpec> measurements;
    bool expectPass = true;
    PlaneWaveScaling scaling;
    std::vector<double> eps;
    double ratioMin = 0.8, ratioMax = 1.25;
    double slopeThreshold = 1.0;
    ContentClass contentClass = ContentClass::singleLayer;
};

struct DistinguishSetup {
    ConvexPolygon domain, first, second;
    ContentModel content;
    BoundarySpec measurement;
    double dataH = 0.025, hMesh = 0.05;
    NewtonOptions newton;
    double minGap = 1e-3;
    std::vector<double> familyScales;
};

using Setup = std::variant<ForwardSetup, CornerDecaySetup, ExtractionSetup, ShapeSetup, CoeffSetup, NestSetup,
                           AdmissibilitySetup, DistinguishSetup>;

void requireFinerData(Reader& r, double dataH, double hMesh)
{
    if (dataH > 0.5 * hMesh + 1e-15) r.fail("'data_h' must be at most half of 'h_mesh' to avoid an inverse crime");
}

ForwardSetup parseForward(Reader r)
{
    ForwardSetup s;
    s.mode = r.string("mode", "solve");
    s.domain = readPolygon(r.child("domain"));
    if (r.has("layers")) s.layers = readPolygons(r, "layers");
    requireNested(r, s.domain, s.layers);
    s.content = readContent(r.child("content"));
    if (s.content.layers.size() < s.layers.size()) r.fail("content needs coefficients for every layer");
    s.hMesh = r.positive("h_mesh");
    s.newton = readNewton(r);
    if (s.mode == "solve") {
        s.psi = readBoundary(r.child("psi"));
    } else if (s.mode == "smallData") {
        s.psi = readBoundary(r.child("psi"));
        s.eps = r.numbers("eps");
        if (s.eps.size() < 2) r.fail("'eps' needs at least two values");
        for (double e : s.eps)
            if (!(e > 0)) r.fail("'eps' values must be positive");
        s.spreadLimit = r.positive("spread_limit", 2.0);
        s.maxIterations = r.integer("max_iterations", 8);
    } else if (s.mode == "convergence") {
        s.amplitude = r.complex("amplitude", 1.0);
        s.refinements = r.integer("refinements", 3);
        if (s.refinements < 2) r.fail("'refinements' must be at least 2");
        s.expectedRate = r.number("expected_rate", 2.0);
        s.rateTol = r.positive("rate_tol", 0.2);
    } else {
        r.fail("'mode' must be solve, smallData or convergence");
    }
    r.finish();
    return s;
}

SweepQuantity readQuantity(Reader& r)
{
    const std::string q = r.string("quantity");
    if (q == "cornerIntegral") return SweepQuantity::cornerIntegral;
    if (q == "weightedIntegral") return SweepQuantity::weightedIntegral;
    if (q == "lidL2") return SweepQuantity::lidL2;
    if (q == "lidH1") return SweepQuantity::lidH1;
    if (q == "lidDnu") return SweepQuantity::lidDnu;
    r.fail("unknown quantity '" + q + "'");
}

CornerDecaySetup parseCornerDecay(Reader r)
{
    CornerDecaySetup s;
    s.corner = readCorner(r.child("corner"));
    s.taus = readTaus(r.child("taus"));
    s.relTol = r.positive("rel_tol", 1e-10);
    for (Reader c : r.children("sweeps")) {
        SweepCheck k;
        k.quantity = readQuantity(c);
        k.alpha = c.number("alpha", 0.0);
        if (k.quantity == SweepQuantity::weightedIntegral && !(k.alpha > 0)) c.fail("'alpha' must be positive");
        if (c.has("slope")) {
            Reader sl = c.child("slope");
            k.slope = true;
            k.slopeExpected = sl.number("expected");
            k.slopeTol = sl.positive("tol");
            sl.finish();
        }
        k.rateTol = c.has("rate_tol") ? c.positive("rate_tol") : -1.0;
        k.bounds = c.boolean("check_bounds", false);
        k.closedFormTol = c.has("closed_form_tol") ? c.positive("closed_form_tol") : -1.0;
        if (c.has("leading")) {
            Reader l = c.child("leading");
            k.leading = true;
            k.leadingMin = l.positive("min");
            k.leadingMax = l.positive("max");
            l.finish();
        }
        const bool lid = k.quantity == SweepQuantity::lidL2 || k.quantity == SweepQuantity::lidH1 ||
                         k.quantity == SweepQuantity::lidDnu;
        if ((k.rateTol > 0 || k.bounds) && !lid) c.fail("rate and bound checks apply to lid norms only");
        if (k.slope && lid) c.fail("lid norms decay exponentially; use 'rate_tol'");
        if (k.closedFormTol > 0 && (k.quantity != SweepQuantity::cornerIntegral || s.corner.dim != 2))
            c.fail("the closed form exists for the plain 2D sector integral only");
        if (k.leading && k.quantity != SweepQuantity::cornerIntegral) c.fail("'leading' applies to the plain integral");
        c.finish();
        s.sweeps.push_back(k);
    }
    if (s.sweeps.empty()) r.fail("'sweeps' must not be empty");
    r.finish();
    return s;
}

ExtractionSetup parseExtraction(Reader r)
{
    ExtractionSetup s;
    s.corner = readCorner(r.child("corner"));
    if (s.corner.dim != 2) r.fail("extraction is two-dimensional");
    s.taus = readTaus(r.child("taus"));
    Reader bg = r.child("background");
    s.k = bg.number("k");
    s.direction = bg.vec2("direction");
    if (s.direction.norm() == 0) bg.fail("'direction' must be nonzero");
    bg.finish();
    Reader bump = r.child("bump");
    s.c = bump.complex("c");
    s.b = bump.complex("b");
    s.alpha = bump.positive("alpha");
    bump.finish();
    s.flankGamma = r.complex("flank_gamma", 0.0);
    const std::string mode = r.string("mode", "fullBoundary");
    if (mode == "fullBoundary")
        s.mode = BoundaryMode::fullBoundary;
    else if (mode == "lidOnly")
        s.mode = BoundaryMode::lidOnly;
    else
        r.fail("'mode' must be fullBoundary or lidOnly");
    s.relTol = r.positive("rel_tol", 1e-11);
    if (r.has("green")) {
        Reader g = r.child("green");
        s.green = true;
        s.greenRelTol = g.positive("rel_tol", 1e-10);
        s.greenMax = g.positive("max_residual", 1e-8);
        g.finish();
    }
    if (r.has("limit")) {
        Reader l = r.child("limit");
        s.limit = true;
        s.limitRelTol = l.positive("rel_tol", 0.02);
        s.orderTol = l.positive("order_tol", 0.3);
        l.finish();
    }
    if (!s.green && !s.limit) r.fail("nothing to check: give 'green' and/or 'limit'");
    r.finish();
    return s;
}

ShapeRecoveryOptions readSearch(Reader& r)
{
    ShapeRecoveryOptions o;
    if (!r.has("search")) return o;
    Reader c = r.child("search");
    o.maxEvaluations = c.integer("max_evaluations", o.maxEvaluations);
    o.initialStep = c.positive("initial_step", o.initialStep);
    o.sizeTol = c.positive("size_tol", o.sizeTol);
    o.restarts = c.integer("restarts", o.restarts);
    o.misfitTol = c.positive("misfit_tol", o.misfitTol);
    o.flatTol = c.positive("flat_tol", o.flatTol);
    if (o.maxEvaluations < 1 || o.restarts < 0) c.fail("evaluation and restart counts must be positive");
    c.finish();
    return o;
}

ShapeSetup parseShape(Reader r)
{
    ShapeSetup s;
    s.domain = readPolygon(r.child("domain"));
    s.truth = readPolygon(r.child("truth"));
    requireNested(r, s.domain, {s.truth});
    s.content = readContent(r.child("content"));
    if (s.content.layers.size() != 1) r.fail("shape recovery has one inclusion: content needs one layer");
    s.measurements = readBoundaries(r, "measurements");
    s.dataH = r.positive("data_h");
    s.hMesh = r.positive("h_mesh");
    requireFinerData(r, s.dataH, s.hMesh);
    s.newton = readNewton(r);
    s.initial = readInitial(r.child("initial"));
    s.search = readSearch(r);
    s.vertexTolFactor = r.positive("vertex_tol_factor", 2.0);
    r.finish();
    return s;
}

CoeffSetup parseCoeff(Reader r)
{
    CoeffSetup s;
    if (r.has("vandermonde")) {
        Reader v = r.child("vandermonde");
        VandermondeSetup vs;
        vs.apex = v.complexes("apex_values");
        vs.coefficients = v.complexes("coefficients");
        if (vs.apex.empty() || vs.apex.size() != vs.coefficients.size())
            v.fail("need as many apex values as coefficients");
        vs.tol = v.positive("tol", 1e-10);
        v.finish();
        s.vandermonde = vs;
    }
    if (r.has("boundary")) {
        Reader b = r.child("boundary");
        BoundaryCoeffSetup bs;
        bs.domain = readPolygon(b.child("domain"));
        bs.nest = readPolygons(b, "inclusions");
        if (bs.nest.empty()) b.fail("'inclusions' must not be empty");
        requireNested(b, bs.domain, bs.nest);
        bs.content = readContent(b.child("content"));
        if (bs.content.layers.size() != bs.nest.size()) b.fail("content needs one coefficient vector per inclusion");
        bs.slots = readSlots(b, "slots");
        checkSlots(b, bs.slots, bs.content);
        bs.measurements = readBoundaries(b, "measurements");
        if (bs.measurements.size() < bs.slots.size())
            b.fail("need at least as many measurements as unknown coefficients");
        bs.dataH = b.positive("data_h");
        bs.hMesh = b.positive("h_mesh");
        requireFinerData(b, bs.dataH, bs.hMesh);
        bs.newton = readNewton(b);
        bs.initialScale = b.positive("initial_scale", 0.8);
        bs.relTol = b.positive("rel_tol", 0.01);
        bs.fit.complexCoefficients = b.boolean("complex", false);
        bs.fit.maxIterations = b.integer("max_iterations", bs.fit.maxIterations);
        b.finish();
        s.boundary = bs;
    }
    if (!s.vandermonde && !s.boundary) r.fail("give 'vandermonde' and/or 'boundary'");
    r.finish();
    return s;
}

NestSetup parseNest(Reader r)
{
    NestSetup s;
    s.domain = readPolygon(r.child("domain"));
    s.truth = readPolygons(r, "truth");
    if (s.truth.empty()) r.fail("'truth' must not be empty");
    requireNested(r, s.domain, s.truth);
    s.content = readContent(r.child("content"));
    if (s.content.layers.size() != s.truth.size()) r.fail("content needs one coefficient vector per layer");
    if (s.content.classTag == ContentClass::singleLayer && s.truth.size() > 1)
        r.fail("a nest needs content class A or B");
    s.measurements = readBoundaries(r, "measurements");
    std::size_t unknowns = 0;
    for (const auto& l : s.content.layers) unknowns += l.size();
    if (s.content.classTag == ContentClass::classB && s.measurements.size() != 1)
        r.fail("class B nests are recovered from a single measurement");
    if (s.content.classTag == ContentClass::classA && s.measurements.size() != unknowns)
        r.fail("class A nests need one measurement per layer coefficient (" + std::to_string(unknowns) + ")");
    s.dataH = r.positive("data_h");
    s.hMesh = r.positive("h_mesh");
    requireFinerData(r, s.dataH, s.hMesh);
    s.newton = readNewton(r);
    for (Reader i : r.children("initial")) s.initial.push_back(readInitial(i));
    if (s.initial.size() != s.truth.size()) r.fail("'initial' needs one entry per layer");
    s.initialContentScale = r.positive("initial_content_scale", 0.8);
    s.slots = readSlots(r, "slots");
    checkSlots(r, s.slots, s.content);
    s.options.similarityShapes = r.boolean("similarity", false);
    s.options.refinementIterations = r.integer("refinement_iterations", 100);
    s.options.misfitTol = r.positive("misfit_tol", 0.05);
    s.options.shape = readSearch(r);
    s.interfaceTolFactor = r.positive("interface_tol_factor", 2.0);
    s.lambdaRelTol = r.positive("lambda_rel_tol", 0.02);
    r.finish();
    return s;
}

AssumptionKind readAssumption(Reader& r)
{
    const std::string a = r.string("assumption");
    if (a == "A") return AssumptionKind::A;
    if (a == "B") return AssumptionKind::B;
    if (a == "C") return AssumptionKind::C;
    if (a == "D") return AssumptionKind::D;
    r.fail("'assumption' must be A, B, C or D");
}

PlaneWaveScaling readScaling(Reader r)
{
    PlaneWaveScaling s;
    s.k0 = r.positive("k0", 1.0);
    s.zeta0 = r.positive("zeta0", 0.5);
    s.direction = r.vec2("direction", Vec2(1.0, 0.0));
    if (s.direction.norm() == 0) r.fail("'direction' must be nonzero");
    if (r.has("layer_zeta")) {
        const Json& z = r.raw("layer_zeta");
        if (!z.is_array()) r.fail("'layer_zeta' must be an array of numbers or nulls");
        for (const auto& e : z) {
            if (e.is_null())
                s.layerZeta.push_back(std::numeric_limits<double>::quiet_NaN());
            else if (e.is_number() && e.get<double>() > 0)
                s.layerZeta.push_back(e.get<double>());
            else
                r.fail("'layer_zeta' entries must be positive numbers or null");
        }
    }
    if (r.has("multipliers")) {
        s.multipliers = r.numbers("multipliers");
        if (s.multipliers.empty()) r.fail("'multipliers' must not be empty");
    }
    r.finish();
    return s;
}

AdmissibilitySetup parseAdmissibility(Reader r)
{
    AdmissibilitySetup s;
    s.mode = r.string("mode", "check");
    s.assumption = readAssumption(r);
    s.config.domain = readPolygon(r.child("domain"));
    s.config.layers = readPolygons(r, "layers");
    if (s.config.layers.empty()) r.fail("'layers' must not be empty");
    requireNested(r, s.config.domain, s.config.layers);
    s.config.content = readContent(r.child("content"));
    if (s.config.content.layers.size() != s.config.layers.size()) r.fail("content needs one coefficient vector per layer");
    s.contentClass = s.config.content.classTag;
    s.config.hMesh = r.positive("h_mesh");
    s.config.newton = readNewton(r);
    s.config.toleranceFactor = r.positive("tolerance_factor", 10.0);
    if (r.has("measurement_layer")) {
        for (double v : r.numbers("measurement_layer")) s.config.measurementLayer.push_back(static_cast<int>(v));
    }
    const bool single = s.assumption == AssumptionKind::A || s.assumption == AssumptionKind::B;
    if (single && s.config.layers.size() != 1) r.fail("assumptions A and B concern a single inclusion");
    if (s.mode == "check") {
        s.measurements = readBoundaries(r, "measurements");
        s.expectPass = r.boolean("expect_pass", true);
        if (!s.config.measurementLayer.empty() && s.config.measurementLayer.size() != s.measurements.size())
            r.fail("'measurement_layer' needs one entry per measurement");
    } else if (s.mode == "leadingOrder" || s.mode == "expansion") {
        s.scaling = readScaling(r.child("scaling"));
        s.eps = r.numbers("eps");
        if (s.eps.size() < 2) r.fail("'eps' needs at least two values");
        for (double e : s.eps)
            if (!(e > 0)) r.fail("'eps' values must be positive");
        if (s.mode == "leadingOrder") {
            const std::vector<double> range = r.has("ratio_range") ? r.numbers("ratio_range") : std::vector<double>{0.8, 1.25};
            if (range.size() != 2 || !(range[0] < range[1])) r.fail("'ratio_range' must be [min, max]");
            s.ratioMin = range[0];
            s.ratioMax = range[1];
            if (!s.config.measurementLayer.empty() && s.config.measurementLayer.size() != s.scaling.multipliers.size())
                r.fail("'measurement_layer' needs one entry per multiplier");
        } else {
            s.slopeThreshold = r.positive("slope_threshold", 1.0);
        }
    } else {
        r.fail("'mode' must be check, leadingOrder or expansion");
    }
    r.finish();
    return s;
}

DistinguishSetup parseDistinguish(Reader r)
{
    DistinguishSetup s;
    s.domain = readPolygon(r.child("domain"));
    s.first = readPolygon(r.child("first"));
    s.second = readPolygon(r.child("second"));
    requireNested(r, s.domain, {s.first});
    requireNested(r, s.domain, {s.second});
    s.content = readContent(r.child("content"));
    if (s.content.layers.size() != 1) r.fail("content needs one layer");
    s.measurement = readBoundary(r.child("measurement"));
    s.dataH = r.positive("data_h");
    s.hMesh = r.positive("h_mesh");
    s.newton = readNewton(r);
    s.minGap = r.positive("min_gap", 1e-3);
    if (r.has("family_scales")) {
        s.familyScales = r.numbers("family_scales");
        for (double f : s.familyScales) {
            if (!(f > 0)) r.fail("'family_scales' must be positive");
            requireNested(r, s.domain, {s.first.scaled(f)});
        }
    }
    r.finish();
    return s;
}

ExperimentKind readKind(Reader& r)
{
    const std::string k = r.string("kind");
    for (ExperimentKind e : {ExperimentKind::forward, ExperimentKind::cornerDecay, ExperimentKind::extraction,
                             ExperimentKind::shapeRecover, ExperimentKind::coeffRecover, ExperimentKind::nestRecover,
                             ExperimentKind::admissibility, ExperimentKind::distinguish})
        if (kindName(e) == k) return e;
    r.fail("unknown experiment kind '" + k + "'");
}

Setup buildSetup(ExperimentKind kind, const Json& params)
{
    Reader r(params, "params");
    switch (kind) {
    case ExperimentKind::forward: return parseForward(r);
    case ExperimentKind::cornerDecay: return parseCornerDecay(r);
    case ExperimentKind::extraction: return parseExtraction(r);
    case ExperimentKind::shapeRecover: return parseShape(r);
    case ExperimentKind::coeffRecover: return parseCoeff(r);
    case ExperimentKind::nestRecover: return parseNest(r);
    case ExperimentKind::admissibility: return parseAdmissibility(r);
    case ExperimentKind::distinguish: return parseDistinguish(r);
    }
    throw ConfigError("unknown experiment kind");
}

// ---------------------------------------------------------------- running

struct Outcome {
    bool pass = true;
    Json summary = Json::object();
    std::vector<Artifact> artifacts;
    std::ostringstream text;

    void check(const std::string& name, bool ok, const std::string& detail)
    {
        pass = pass && ok;
        summary["checks"].push_back({{"name", name}, {"pass", ok}, {"detail", detail}});
        text << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    }
};

template <class T>
std::string str(const T& v)
{
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

std::string csvOf(const std::function<void(std::ostream&)>& write)
{
    std::ostringstream os;
    write(os);
    return os.str();
}

// Manufactured solution A sin(pi x + 0.3) sin(pi y + 0.2).
cplx manufactured(const Vec2& x, cplx a) { return a * std::sin(kPi * x.x() + 0.3) * std::sin(kPi * x.y() + 0.2); }

int regionAt(const std::vector<ConvexPolygon>& layers, const Vec2& x)
{
    int region = 0;
    for (std::size_t l = 0; l < layers.size(); ++l)
        if (layers[l].containsClosed(x)) region = static_cast<int>(l + 1);
    return region;
}

double l2Error(const FemField& f, const std::function<cplx(const Vec2&)>& exact)
{
    // Edge-midpoint rule, exact for quadratics.
    const TriMesh& m = *f.mesh;
    double s = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        double local = 0.0;
        for (int e = 0; e < 3; ++e) {
            const int a = tri[e], b = tri[(e + 1) % 3];
            const Vec2 mid = 0.5 * (m.nodes[a] + m.nodes[b]);
            const cplx uh = 0.5 * (f.values[a] + f.values[b]);
            local += std::norm(uh - exact(mid));
        }
        s += m.triangleArea(t) * local / 3.0;
    }
    return std::sqrt(s);
}

void runForward(const ForwardSetup& s, Outcome& o)
{
    auto mesh = std::make_shared<const TriMesh>(triangulate(s.domain, s.layers, s.hMesh));
    o.summary["nodes"] = mesh->nodes.size();
    if (s.mode == "solve") {
        const FemField f = solveSemilinear(mesh, s.content, boundaryValues(*mesh, s.psi.function()), s.newton);
        const CauchyData d = dirichletToNeumann(f);
        o.artifacts.push_back({"cauchy.csv", csvOf([&](std::ostream& os) { d.writeCsv(os); })});
        const double uNorm = h1Norm(*mesh, f.values);
        o.summary["newton_iterations"] = f.newtonIterations;
        o.summary["u_h1_norm"] = uNorm;
        o.summary["final_residual"] = f.residualHistory.empty() ? 0.0 : f.residualHistory.back();
        if (s.psi.type == "zero")
            o.check("zero data", uNorm == 0.0 && f.newtonIterations == 0,
                    "u norm " + str(uNorm) + ", " + std::to_string(f.newtonIterations) + " Newton iterations");
        else
            o.check("solve", true, std::to_string(f.newtonIterations) + " Newton iterations, |u|_H1 = " + str(uNorm));
    } else if (s.mode == "smallData") {
        const SmallDataReport rep =
            smallDataBound(mesh, s.content, boundaryValues(*mesh, s.psi.function()), s.eps, s.spreadLimit, s.newton);
        int worst = 0;
        Json rows = Json::array();
        std::ostringstream csv;
        csv << "eps,u_norm,psi_norm,ratio,iterations\n";
        for (const auto& r : rep.rows) {
            worst = std::max(worst, r.iterations);
            csv << csvNumber(r.eps) << ',' << csvNumber(r.uNorm) << ',' << csvNumber(r.psiNorm) << ','
                << csvNumber(r.ratio) << ',' << r.iterations << '\n';
        }
        o.artifacts.push_back({"small_data.csv", csv.str()});
        o.summary["ratio_spread"] = rep.spread;
        o.summary["max_newton_iterations"] = worst;
        o.check("Newton iterations", worst <= s.maxIterations,
                std::to_string(worst) + " <= " + std::to_string(s.maxIterations));
        o.check("norm ratio spread", rep.spread < s.spreadLimit, str(rep.spread) + " < " + str(s.spreadLimit));
    } else {
        ContentModel c = s.content;
        const std::vector<ConvexPolygon> layers = s.layers;
        const cplx a = s.amplitude;
        c.forcing = [c0 = s.content, layers, a](const Vec2& x) {
            const cplx u = manufactured(x, a);
            return 2.0 * kPi * kPi * u - c0.a(regionAt(layers, x), u);
        };
        auto exact = [a](const Vec2& x) { return manufactured(x, a); };
        std::vector<double> hs, errs;
        std::ostringstream csv;
        csv << "h,l2_error,iterations\n";
        auto m = mesh;
        for (int level = 0; level <= s.refinements; ++level) {
            if (level > 0) m = std::make_shared<const TriMesh>(refine(*m));
            const FemField f = solveSemilinear(m, c, boundaryValues(*m, exact), s.newton);
            const double h = m->maxEdgeLength();
            const double e = l2Error(f, exact);
            hs.push_back(h);
            errs.push_back(e);
            csv << csvNumber(h) << ',' << csvNumber(e) << ',' << f.newtonIterations << '\n';
        }
        o.artifacts.push_back({"convergence.csv", csv.str()});
        const double rate = fitPowerLaw(hs, errs).slope;
        o.summary["rate"] = rate;
        o.check("L2 convergence rate", std::abs(rate - s.expectedRate) <= s.rateTol,
                str(rate) + " within " + str(s.rateTol) + " of " + str(s.expectedRate));
    }
}

std::string quantityKey(SweepQuantity q, double alpha)
{
    switch (q) {
    case SweepQuantity::cornerIntegral: return "corner_integral";
    case SweepQuantity::weightedIntegral: return "weighted_alpha_" + str(alpha);
    case SweepQuantity::lidL2: return "lid_l2";
    case SweepQuantity::lidH1: return "lid_h1";
    case SweepQuantity::lidDnu: return "lid_dnu";
    }
    return "sweep";
}

void runCornerDecay(const CornerDecaySetup& s, Outcome& o)
{
    const double zetaH = chooseProbeDirection(s.corner).zeta * s.corner.radius;
    for (const SweepCheck& c : s.sweeps) {
        const std::string key = quantityKey(c.quantity, c.alpha);
        const SweepReport rep = tauSweep(s.corner, s.taus, c.quantity, c.alpha, s.relTol);
        o.artifacts.push_back({"sweep_" + key + ".csv", csvOf([&](std::ostream& os) { rep.writeCsv(os); })});
        Json& js = o.summary["sweeps"][key];
        js["fit_slope"] = rep.fit.slope;
        if (c.slope)
            o.check(key + " slope", std::abs(rep.fit.slope - c.slopeExpected) <= c.slopeTol,
                    str(rep.fit.slope) + " vs " + str(c.slopeExpected) + " +- " + str(c.slopeTol));
        if (c.rateTol > 0) {
            const double rate = -rep.fit.slope;
            js["rate"] = rate;
            js["zeta_h"] = zetaH;
            o.check(key + " decay rate", std::abs(rate / zetaH - 1.0) <= c.rateTol,
                    str(rate) + " vs zeta h = " + str(zetaH) + " within " + str(100 * c.rateTol) + "%");
        }
        if (c.bounds) {
            double worst = 0.0;
            for (double r : rep.ratios) worst = std::max(worst, r);
            js["max_value_over_bound"] = worst;
            o.check(key + " below bound", worst <= 1.0 + 1e-12, "max value/bound " + str(worst));
        }
        if (c.closedFormTol > 0) {
            double worst = 0.0;
            for (double tau : s.taus) {
                const CgoProbe probe = CgoProbe::forCorner(s.corner, tau);
                // Truncating at R with exp(-zeta tau R) below 1e-20 leaves the infinite-sector value.
                TruncatedCorner far = s.corner;
                far.radius = std::max(s.corner.radius, 46.0 / (probe.direction.zeta * tau));
                CgoProbe farProbe = CgoProbe::forCorner(far, tau);
                const cplx quad = cornerIntegral(farProbe, IntegralMethod::quadrature, 1e-13).value;
                const cplx closed = infiniteSectorIntegral(probe);
                worst = std::max(worst, std::abs(closed - quad) / std::abs(quad));
            }
            js["closed_form_rel_error"] = worst;
            o.check(key + " closed form", worst <= c.closedFormTol, "relative error " + str(worst));
        }
        if (c.leading) {
            const double ref = std::tgamma(static_cast<double>(s.corner.dim)) * angularMeasure(s.corner);
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (std::size_t i = s.taus.size() / 2; i < s.taus.size(); ++i) {
                const double r = rep.values[i] * std::pow(s.taus[i], s.corner.dim) / ref;
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            js["leading_ratio_min"] = lo;
            js["leading_ratio_max"] = hi;
            o.check(key + " leading constant", lo >= c.leadingMin && hi <= c.leadingMax,
                    "|I| tau^n / (Gamma(n) |S|) in [" + str(lo) + ", " + str(hi) + "]");
        }
    }
}

void runExtraction(const ExtractionSetup& s, Outcome& o)
{
    const Vec2 apex = s.corner.apex.head<2>();
    const AnalyticField v = planeWave(s.k, s.direction);
    AnalyticField u = combine(v, apexBump(apex, s.c, s.b, s.alpha));
    if (s.flankGamma != cplx(0.0)) u = combine(u, flankBump(s.corner, s.flankGamma));
    if (s.green) {
        double worst = 0.0;
        std::ostringstream csv;
        csv << "tau,volume_re,volume_im,boundary_re,boundary_im,relative_residual\n";
        for (double tau : s.taus) {
            const GreenTerms g = greenIdentityResidual(s.corner, u, v, CgoProbe::forCorner(s.corner, tau), s.greenRelTol);
            worst = std::max(worst, g.relativeResidual);
            const cplx bside = g.lid + g.flanks;
            csv << csvNumber(tau) << ',' << csvNumber(g.volume.real()) << ',' << csvNumber(g.volume.imag()) << ','
                << csvNumber(bside.real()) << ',' << csvNumber(bside.imag()) << ',' << csvNumber(g.relativeResidual)
                << '\n';
        }
        o.artifacts.push_back({"green_identity.csv", csv.str()});
        o.summary["green_max_relative_residual"] = worst;
        o.check("Green identity", worst <= s.greenMax, "max relative residual " + str(worst));
    }
    if (s.limit) {
        ExtractionOptions eo;
        eo.mode = s.mode;
        eo.relTol = s.relTol;
        const ExtractionResult r = extractApexValue(s.corner, u, v, s.taus, eo);
        o.artifacts.push_back({"extraction.csv", csvOf([&](std::ostream& os) { r.writeCsv(os); })});
        const cplx expected = s.mode == BoundaryMode::fullBoundary ? s.c : cplx(0.0);
        const double err = std::abs(expected) > 0 ? std::abs(r.limit - expected) / std::abs(expected)
                                                   : std::abs(r.limit);
        o.summary["limit"] = complexJson(r.limit);
        o.summary["expected_limit"] = complexJson(expected);
        o.summary["error_order"] = r.errorOrder;
        o.check("extrapolated limit", err <= s.limitRelTol, "relative error " + str(err));
        if (s.mode == BoundaryMode::fullBoundary)
            o.check("remainder order", std::abs(r.errorOrder - s.alpha) <= s.orderTol,
                    str(r.errorOrder) + " vs alpha " + str(s.alpha));
    }
}

std::vector<Measurement> synthesize(const ConvexPolygon& domain, const std::vector<ConvexPolygon>& nest,
                                    const ContentModel& content, const std::vector<BoundarySpec>& specs, double dataH,
                                    const NewtonOptions& newton)
{
    std::vector<Measurement> out;
    for (std::size_t j = 0; j < specs.size(); ++j) {
        const BoundaryFunction f = specs[j].function();
        out.push_back({"m" + std::to_string(j + 1), f, synthesizeCauchyData(domain, nest, content, f, dataH, newton)});
    }
    return out;
}

std::string verticesCsv(const std::vector<std::pair<std::string, ConvexPolygon>>& polys)
{
    std::ostringstream os;
    os << "polygon,vertex,x,y\n";
    for (const auto& [name, p] : polys)
        for (std::size_t i = 0; i < p.size(); ++i)
            os << name << ',' << i << ',' << csvNumber(p.vertex(i).x()) << ',' << csvNumber(p.vertex(i).y()) << '\n';
    return os.str();
}

void runShape(const ShapeSetup& s, std::mt19937_64& rng, Outcome& o)
{
    RecoveryProblem p;
    p.domain = s.domain;
    p.hMesh = s.hMesh;
    p.newton = s.newton;
    p.measurements = synthesize(s.domain, {s.truth}, s.content, s.measurements, s.dataH, s.newton);
    const ConvexPolygon init = resolve(s.initial, s.truth, rng);
    const ShapeRecoveryResult r = recoverConvexPolygon(p, init, s.content, s.search);
    std::ostringstream hist;
    hist << "iteration,misfit\n";
    for (std::size_t i = 0; i < r.history.size(); ++i) hist << i << ',' << csvNumber(r.history[i]) << '\n';
    o.artifacts.push_back({"history.csv", hist.str()});
    o.artifacts.push_back({"vertices.csv", verticesCsv({{"truth", s.truth}, {"initial", init}, {"recovered", r.shape}})});
    const double dist = worstVertexDistance(r.shape, s.truth);
    o.summary["recovered"] = polygonJson(r.shape);
    o.summary["initial"] = polygonJson(init);
    o.summary["misfit"] = r.misfit;
    o.summary["evaluations"] = r.evaluations;
    o.summary["worst_vertex_distance"] = dist;
    o.summary["hausdorff"] = boundaryHausdorff(r.shape, s.truth);
    o.summary["diagnostics"] = r.diagnostics;
    o.check("vertices", r.shape.size() == s.truth.size() && dist <= s.vertexTolFactor * s.hMesh,
            "worst vertex distance " + str(dist) + " <= " + str(s.vertexTolFactor * s.hMesh));
}

double relativeError(cplx got, cplx want)
{
    return std::abs(want) > 0 ? std::abs(got - want) / std::abs(want) : std::abs(got);
}

void runCoeff(const CoeffSetup& s, Outcome& o)
{
    if (s.vandermonde) {
        const auto& v = *s.vandermonde;
        const std::vector<cplx> g = forwardVandermonde(v.apex, v.coefficients);
        const VandermondeSolution sol = recoverCoefficients(v.apex, g);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, relativeError(sol.coefficients[i], v.coefficients[i]));
        Json c = Json::array();
        for (cplx z : sol.coefficients) c.push_back(complexJson(z));
        o.summary["vandermonde"] = {{"coefficients", c}, {"condition", sol.conditionNumber}, {"max_rel_error", worst}};
        o.check("Vandermonde round trip", worst <= v.tol, "max relative error " + str(worst));
    }
    if (s.boundary) {
        const auto& b = *s.boundary;
        RecoveryProblem p;
        p.domain = b.domain;
        p.hMesh = b.hMesh;
        p.newton = b.newton;
        p.measurements = synthesize(b.domain, b.nest, b.content, b.measurements, b.dataH, b.newton);
        ContentModel init = b.content;
        for (const auto& slot : b.slots) {
            auto& z = init.layers[static_cast<std::size_t>(slot.layer - 1)][static_cast<std::size_t>(slot.power - 1)];
            z *= b.initialScale;
        }
        const CoefficientFit fit = recoverCoefficientsFromBoundary(p, b.nest, init, b.slots, b.fit);
        std::ostringstream csv;
        csv << "layer,power,true_re,true_im,recovered_re,recovered_im,rel_error\n";
        double worst = 0.0;
        for (std::size_t i = 0; i < b.slots.size(); ++i) {
            const auto& slot = b.slots[i];
            const cplx want = b.content.layers[static_cast<std::size_t>(slot.layer - 1)][static_cast<std::size_t>(slot.power - 1)];
            const cplx got = fit.coefficients[i];
            const double e = relativeError(got, want);
            worst = std::max(worst, e);
            csv << slot.layer << ',' << slot.power << ',' << csvNumber(want.real()) << ',' << csvNumber(want.imag()) << ','
                << csvNumber(got.real()) << ',' << csvNumber(got.imag()) << ',' << csvNumber(e) << '\n';
        }
        o.artifacts.push_back({"coefficients.csv", csv.str()});
        o.summary["boundary"] = {{"misfit", fit.misfit},
                                 {"iterations", fit.iterations},
                                 {"jacobian_condition", fit.jacobianCondition},
                                 {"rank_deficient", fit.rankDeficient},
                                 {"max_rel_error", worst},
                                 {"diagnostics", fit.diagnostics}};
        o.check("boundary coefficient fit", !fit.rankDeficient && worst <= b.relTol,
                "max relative error " + str(worst) + " <= " + str(b.relTol) + (fit.rankDeficient ? " (rank deficient)" : ""));
    }
}

void runNest(const NestSetup& s, std::mt19937_64& rng, Outcome& o)
{
    RecoveryProblem p;
    p.domain = s.domain;
    p.hMesh = s.hMesh;
    p.newton = s.newton;
    p.measurements = synthesize(s.domain, s.truth, s.content, s.measurements, s.dataH, s.newton);
    NestHypothesis h;
    h.contentClass = s.content.classTag;
    for (std::size_t l = 0; l < s.truth.size(); ++l) h.initialLayers.push_back(resolve(s.initial[l], s.truth[l], rng));
    h.initialContent = s.content;
    for (const auto& slot : s.slots)
        h.initialContent.layers[static_cast<std::size_t>(slot.layer - 1)][static_cast<std::size_t>(slot.power - 1)] *=
            s.initialContentScale;
    h.slots = s.slots;
    const NestRecoveryResult r = recoverNest(p, h, s.options);

    std::vector<std::pair<std::string, ConvexPolygon>> polys;
    Json layers = Json::array();
    double worstInterface = 0.0;
    for (std::size_t l = 0; l < s.truth.size(); ++l) {
        const std::string n = std::to_string(l + 1);
        polys.push_back({"truth_" + n, s.truth[l]});
        polys.push_back({"initial_" + n, h.initialLayers[l]});
        polys.push_back({"recovered_" + n, r.layers[l]});
        const double d = boundaryHausdorff(r.layers[l], s.truth[l]);
        worstInterface = std::max(worstInterface, d);
        layers.push_back({{"recovered", polygonJson(r.layers[l])}, {"hausdorff", d}});
    }
    o.artifacts.push_back({"layers.csv", verticesCsv(polys)});
    std::ostringstream csv;
    csv << "layer,power,true_re,true_im,recovered_re,recovered_im,rel_error\n";
    double worstLambda = 0.0;
    for (const auto& slot : s.slots) {
        const auto li = static_cast<std::size_t>(slot.layer - 1), pi = static_cast<std::size_t>(slot.power - 1);
        const cplx want = s.content.layers[li][pi];
        const cplx got = r.content.layers[li][pi];
        const double e = relativeError(got, want);
        worstLambda = std::max(worstLambda, e);
        csv << slot.layer << ',' << slot.power << ',' << csvNumber(want.real()) << ',' << csvNumber(want.imag()) << ','
            << csvNumber(got.real()) << ',' << csvNumber(got.imag()) << ',' << csvNumber(e) << '\n';
    }
    o.artifacts.push_back({"coefficients.csv", csv.str()});
    Json stages = Json::array();
    for (const auto& st : r.stages) stages.push_back({{"name", st.name}, {"misfit", st.misfit}, {"seconds", st.seconds}});
    o.summary["layers"] = layers;
    o.summary["stages"] = stages;
    o.summary["misfit"] = r.misfit;
    o.summary["class"] = className(s.content.classTag);
    o.summary["worst_interface_distance"] = worstInterface;
    o.summary["worst_coefficient_rel_error"] = worstLambda;
    o.check("interfaces", worstInterface <= s.interfaceTolFactor * s.hMesh,
            "worst Hausdorff distance " + str(worstInterface) + " <= " + str(s.interfaceTolFactor * s.hMesh));
    o.check("coefficients", worstLambda <= s.lambdaRelTol,
            "worst relative error " + str(worstLambda) + " <= " + str(s.lambdaRelTol));
}

void runAdmissibility(const AdmissibilitySetup& s, Outcome& o)
{
    o.summary["assumption"] = assumptionName(s.assumption);
    if (s.mode == "check") {
        AdmissibilityConfig c = s.config;
        for (const auto& m : s.measurements) c.measurements.push_back(m.function());
        const AdmissibilityReport rep = checkAssumption(s.assumption, c);
        o.artifacts.push_back({"quantities.csv", csvOf([&](std::ostream& os) { rep.writeCsv(os); })});
        o.summary["report_pass"] = rep.pass;
        o.summary["worst_margin"] = rep.worstMargin;
        o.summary["tolerance"] = rep.tolerance;
        o.summary["note"] = rep.note;
        for (const auto& q : rep.quantities)
            if (!q.pass && q.type != TestedQuantity::Type::exteriorGap) o.text << "  " << q.describe() << '\n';
        o.check("assumption " + assumptionName(s.assumption), rep.pass == s.expectPass,
                std::string(rep.pass ? "holds" : "fails") + " (expected " + (s.expectPass ? "to hold" : "to fail") +
                    "), worst margin " + str(rep.worstMargin));
    } else if (s.mode == "leadingOrder") {
        const LeadingOrderReport rep = leadingOrderRatios(s.assumption, s.config, s.scaling, s.eps);
        o.artifacts.push_back({"leading_order.csv", csvOf([&](std::ostream& os) { rep.writeCsv(os); })});
        o.summary["min_ratio"] = rep.minRatio;
        o.summary["max_ratio"] = rep.maxRatio;
        o.check("leading-order ratios", rep.minRatio >= s.ratioMin && rep.maxRatio <= s.ratioMax,
                "[" + str(rep.minRatio) + ", " + str(rep.maxRatio) + "] inside [" + str(s.ratioMin) + ", " +
                    str(s.ratioMax) + "] at the smallest eps");
    } else {
        SmallDataConfig c;
        c.domain = s.config.domain;
        c.layers = s.config.layers;
        c.content = s.config.content;
        c.scaling = s.scaling;
        c.hMesh = s.config.hMesh;
        c.newton = s.config.newton;
        c.slopeThreshold = s.slopeThreshold;
        const ExpansionReport rep = s.config.layers.size() > 1 ? nestSmallDataExpansion(c, s.contentClass, s.eps)
                                                               : smallDataExpansion(c, s.eps);
        o.artifacts.push_back({"expansion.csv", csvOf([&](std::ostream& os) { rep.writeCsv(os); })});
        o.summary["slope"] = rep.slope;
        o.summary["monotone"] = rep.monotone;
        o.check("v/eps strictly decreasing", rep.monotone, rep.monotone ? "yes" : "no");
        o.check("log-log slope", rep.slope > s.slopeThreshold, str(rep.slope) + " > " + str(s.slopeThreshold));
    }
}

void runDistinguish(const DistinguishSetup& s, Outcome& o)
{
    const TriMesh target = triangulate(s.domain, {}, s.hMesh);
    const BoundaryFunction f = s.measurement.function();
    auto data = [&](const ConvexPolygon& d) {
        return resampleCauchyData(synthesizeCauchyData(s.domain, {d}, s.content, f, s.dataH, s.newton), target);
    };
    const CauchyData a = data(s.first);
    const double gap = cauchyGap(a, data(s.second));
    const double same = cauchyGap(a, data(s.first));
    o.summary["gap"] = gap;
    o.summary["identical_gap"] = same;
    o.check("distinct inclusions", gap > s.minGap, "cauchyGap " + str(gap) + " > " + str(s.minGap));
    o.check("identical inclusions", same == 0.0, "cauchyGap " + str(same));
    if (!s.familyScales.empty()) {
        std::ostringstream csv;
        csv << "scale,symmetric_difference,gap\n";
        std::vector<std::pair<double, double>> pts;
        for (double sc : s.familyScales) {
            const ConvexPolygon q = s.first.scaled(sc);
            const double g = cauchyGap(a, data(q));
            const double symDiff = std::abs(sc * sc - 1.0) * s.first.area();
            pts.push_back({symDiff, g});
            csv << csvNumber(sc) << ',' << csvNumber(symDiff) << ',' << csvNumber(g) << '\n';
        }
        o.artifacts.push_back({"family.csv", csv.str()});
        std::sort(pts.begin(), pts.end());
        bool monotone = true;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (pts[i].first > pts[i - 1].first && pts[i].second < pts[i - 1].second) monotone = false;
        o.summary["family_monotone"] = monotone;
        o.check("gap grows with the symmetric difference", monotone, monotone ? "yes" : "no");
    }
}

}  // namespace

// ---------------------------------------------------------------- public

std::string kindName(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::forward: return "forward";
    case ExperimentKind::cornerDecay: return "cornerDecay";
    case ExperimentKind::extraction: return "extraction";
    case ExperimentKind::shapeRecover: return "shapeRecover";
    case ExperimentKind::coeffRecover: return "coeffRecover";
    case ExperimentKind::nestRecover: return "nestRecover";
    case ExperimentKind::admissibility: return "admissibility";
    case ExperimentKind::distinguish: return "distinguish";
    }
    return "?";
}

ExperimentConfig parseExperiment(const Json& config)
{
    Reader r(config, "");
    ExperimentConfig c;
    c.name = r.string("name");
    if (c.name.empty()) r.fail("'name' must not be empty");
    c.kind = readKind(r);
    c.seed = static_cast<std::uint64_t>(r.integer("seed", 0));
    c.outputDir = r.string("output_dir", c.name);
    const std::filesystem::path out(c.outputDir);
    if (out.empty() || out.is_absolute()) r.fail("'output_dir' must be a relative path");
    for (const auto& part : out)
        if (part == "..") r.fail("'output_dir' must stay inside the output root");
    r.string("description", "");
    c.params = r.raw("params");
    r.finish();
    buildSetup(c.kind, c.params);
    return c;
}

ExperimentConfig loadExperiment(const std::filesystem::path& file)
{
    if (!std::filesystem::exists(file)) throw ConfigError("config file '" + file.string() + "' does not exist");
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file '" + file.string() + "' is not valid JSON: " + e.what());
    }
    return parseExperiment(j);
}

ExperimentResult runExperiment(const ExperimentConfig& config)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Setup setup = buildSetup(config.kind, config.params);
    std::mt19937_64 rng(config.seed);
    Outcome o;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ForwardSetup>) runForward(s, o);
            if constexpr (std::is_same_v<T, CornerDecaySetup>) runCornerDecay(s, o);
            if constexpr (std::is_same_v<T, ExtractionSetup>) runExtraction(s, o);
            if constexpr (std::is_same_v<T, ShapeSetup>) runShape(s, rng, o);
            if constexpr (std::is_same_v<T, CoeffSetup>) runCoeff(s, o);
            if constexpr (std::is_same_v<T, NestSetup>) runNest(s, rng, o);
            if constexpr (std::is_same_v<T, AdmissibilitySetup>) runAdmissibility(s, o);
            if constexpr (std::is_same_v<T, DistinguishSetup>) runDistinguish(s, o);
        },
        setup);
    ExperimentResult res;
    res.name = config.name;
    res.kind = config.kind;
    res.pass = o.pass;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.summary = std::move(o.summary);
    res.summary["name"] = config.name;
    res.summary["kind"] = kindName(config.kind);
    res.summary["seed"] = config.seed;
    res.summary["pass"] = res.pass;
    res.summary["seconds"] = res.seconds;
    res.artifacts = std::move(o.artifacts);
    std::ostringstream text;
    text << config.name << " (" << kindName(config.kind) << "): " << (res.pass ? "PASS" : "FAIL") << " in "
         << std::setprecision(3) << res.seconds << " s\n"
         << o.text.str();
    res.text = text.str();
    return res;
}

std::filesystem::path writeArtifacts(const ExperimentResult& result, const ExperimentConfig& config,
                                     const std::filesystem::path& root)
{
    const std::filesystem::path dir = root / config.outputDir;
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / name).string());
        out << content;
    };
    for (const auto& a : result.artifacts) write(a.file, a.content);
    write("summary.json", result.summary.dump(2) + "\n");
    write("summary.txt", result.text);
    return dir;
}

namespace {

struct TemplateSource {
    const char* anchor;
    std::vector<int> criteria;
    const char* json;
};

const std::vector<TemplateSource>& templateSources()
{
    static const std::vector<TemplateSource> sources = {
        {"probe integral over a 2D sector decays like tau^-2", {1}, R"({
  "name": "corner-sector-2d", "kind": "cornerDecay", "seed": 1,
  "params": {
    "corner": {"dim": 2, "apex": [0, 0], "axis": [1, 0], "half_angle": 0.7853981633974483, "radius": 1},
    "taus": {"min": 20, "max": 200, "count": 10},
    "sweeps": [{"quantity": "cornerIntegral", "slope": {"expected": -2, "tol": 0.05}, "closed_form_tol": 1e-8}]
  }})"},
        {"probe integral over a 3D circular cone decays like tau^-3", {2}, R"({
  "name": "corner-cone-3d", "kind": "cornerDecay", "seed": 1,
  "params": {
    "corner": {"dim": 3, "apex": [0, 0, 0], "axis": [1, 0, 0], "half_angle": 0.5235987755982988, "radius": 1},
    "taus": {"min": 20, "max": 200, "count": 10},
    "rel_tol": 1e-8,
    "sweeps": [{"quantity": "cornerIntegral", "slope": {"expected": -3, "tol": 0.1}, "leading": {"min": 0.5, "max": 2}}]
  }})"},
        {"weighted corner integrals decay like tau^-(2+alpha)", {3}, R"({
  "name": "corner-weighted", "kind": "cornerDecay", "seed": 1,
  "params": {
    "corner": {"dim": 2, "apex": [0, 0], "axis": [1, 0], "half_angle": 0.7853981633974483, "radius": 1},
    "taus": {"min": 20, "max": 200, "count": 10},
    "sweeps": [
      {"quantity": "weightedIntegral", "alpha": 0.5, "slope": {"expected": -2.5, "tol": 0.05}},
      {"quantity": "weightedIntegral", "alpha": 1, "slope": {"expected": -3, "tol": 0.05}}
    ]
  }})"},
        {"lid norms of the probe decay like exp(-zeta h tau)", {4}, R"({
  "name": "lid-norm-decay", "kind": "cornerDecay", "seed": 1,
  "params": {
    "corner": {"dim": 2, "apex": [0, 0], "axis": [1, 0], "half_angle": 0.7853981633974483, "radius": 1},
    "taus": {"min": 20, "max": 200, "count": 10},
    "sweeps": [
      {"quantity": "lidL2", "rate_tol": 0.05, "check_bounds": true},
      {"quantity": "lidH1", "rate_tol": 0.05, "check_bounds": true},
      {"quantity": "lidDnu", "rate_tol": 0.05, "check_bounds": true}
    ]
  }})"},
        {"Green identity on the truncated corner", {5}, R"({
  "name": "green-identity", "kind": "extraction", "seed": 1,
  "params": {
    "corner": {"dim": 2, "apex": [0, 0], "axis": [1, 0], "half_angle": 0.7853981633974483, "radius": 1},
    "taus": {"min": 5, "max": 50, "count": 5},
    "background": {"k": 1.5, "direction": [1, 0.3]},
    "bump": {"c": [2, -1], "b": 1, "alpha": 1},
    "flank_gamma": [0.5, 0.25],
    "green": {"rel_tol": 1e-10, "max_residual": 1e-8}
  }})"},
        {"apex value extraction from the corner identity", {6}, R"({
  "name": "apex-extraction", "kind": "extraction", "seed": 1,
  "params": {
    "corner": {"dim": 2, "apex": [0, 0], "axis": [1, 0], "half_angle": 0.7853981633974483, "radius": 1},
    "taus": {"min": 20, "max": 400, "count": 12},
    "background": {"k": 1.5, "direction": [1, 0.3]},
    "bump": {"c": [2, -1], "b": 1, "alpha": 1},
    "mode": "fullBoundary",
    "limit": {"rel_tol": 0.02, "order_tol": 0.3}
  }})"},
        {"Newton solves with small boundary data", {7}, R"({
  "name": "small-data-newton", "kind": "forward", "seed": 1,
  "params": {
    "mode": "smallData",
    "domain": {"rectangle": [0, 0, 1, 1]},
    "layers": [{"vertices": [[0.3, 0.3], [0.7, 0.35], [0.45, 0.7]]}],
    "content": {"background": 4, "layers": [[-30, 2]]},
    "psi": {"type": "planeWave", "k": 2, "direction": [1, 1]},
    "h_mesh": 0.05,
    "newton": {"tol": 1e-10, "max_iter": 20},
    "eps": [1e-1, 1e-2, 1e-3, 1e-4],
    "spread_limit": 2,
    "max_iterations": 8
  }})"},
        {"zero boundary data gives the zero solution", {7}, R"({
  "name": "forward-zero-data", "kind": "forward", "seed": 1,
  "params": {
    "mode": "solve",
    "domain": {"rectangle": [0, 0, 1, 1]},
    "layers": [{"vertices": [[0.3, 0.3], [0.7, 0.35], [0.45, 0.7]]}],
    "content": {"background": 4, "layers": [[-30, 2]]},
    "psi": {"type": "zero"},
    "h_mesh": 0.05
  }})"},
        {"forward solver L2 convergence on a manufactured solution", {8}, R"({
  "name": "fem-convergence", "kind": "forward", "seed": 1,
  "params": {
    "mode": "convergence",
    "domain": {"rectangle": [0, 0, 1, 1]},
    "layers": [{"rectangle": [0.25, 0.25, 0.75, 0.75]}],
    "content": {"background": 2, "layers": [[-5, 1]]},
    "amplitude": 0.5,
    "h_mesh": 0.2,
    "refinements": 3,
    "expected_rate": 2, "rate_tol": 0.2
  }})"},
        {"small-data remainder is o(eps)", {9}, R"({
  "name": "small-data-expansion", "kind": "admissibility", "seed": 1,
  "params": {
    "mode": "expansion",
    "assumption": "A",
    "domain": {"rectangle": [0, 0, 1, 1]},
    "layers": [{"vertices": [[0.3, 0.3], [0.7, 0.35], [0.45, 0.7]]}],
    "content": {"background": 1, "layers": [[1, 2]]},
    "scaling": {"k0": 1, "zeta0": 0.5, "direction": [1, 0], "layer_zeta": [0.5]},
    "h_mesh": 0.05,
    "eps": [1e-1, 1e-2, 1e-3, 1e-4],
    "slope_threshold": 1.2
  }})"},
        {"polynomial content coefficients of one inclusion", {10}, R"({
  "name": "coefficient-recovery", "kind": "coeffRecover", "seed": 1,
  "params": {
    "vandermonde": {"apex_values": [[0.3, 0.1], [-0.2, 0.4]], "coefficients": [[-3, 1], 2], "tol": 1e-10},
    "boundary": {
      "domain": {"rectangle": [0, 0, 1, 1]},
      "inclusions": [{"vertices": [[0.3, 0.3], [0.7, 0.35], [0.45, 0.7]]}],
      "content": {"background": 4, "layers": [[-30, 2]]},
      "slots": [{"layer": 1, "power": 1}, {"layer": 1, "power": 2}],
      "measurements": [
        {"type": "planeWave", "amplitude": 1, "k": 2, "direction": [1, 1]},
        {"type": "planeWave", "amplitude": 2, "k": 2, "direction": [1, -1]}
      ],
      "data_h": 0.0125, "h_mesh": 0.025,
      "initial_scale": 0.8,
      "rel_tol": 0.01
    }
  }})"},
        {"convex polygon from one measurement", {11}, R"({
  "name": "triangle-recovery", "kind": "shapeRecover", "seed": 1,
  "params": {
    "domain": {"rectangle": [0, 0, 1, 1]},
    "truth": {"vertices": [[0.3, 0.3], [0.7, 0.35], [0.45, 0.7]]},
    "content": {"background": 4, "layers": [[-30, 2]]},
    "measurements": [{"type": "planeWave", "k": 2, "direction": [1, 1]}],
    "data_h": 0.025, "h_mesh": 0.05,
    "initial": {"perturb": {"scale": 1.2, "shift": [0.03, -0.02]}},
    "search": {"misfit_tol": 1},
    "vertex_tol_factor": 2
  }})"},
        {"class B square nest from one measurement", {12}, R"({
  "name": "square-nest-class-b", "kind": "nestRecover", "seed": 1,
  "params": {
    "domain": {"rectangle": [0, 0, 1, 1]},
    "truth": [{"rectangle": [0.2, 0.2, 0.8, 0.8]}, {"rectangle": [0.35, 0.35, 0.65, 0.65]}],
    "content": {"background": 4, "layers": [[20], [-60, 2]], "class": "B"},
    "measurements": [{"type": "planeWave", "k": 2, "direction": [1, 1]}],
    "data_h": 0.0125, "h_mesh": 0.025,
    "initial": [
      {"polygon": {"rectangle": [0.19, 0.16, 0.83, 0.8]}},
      {"polygon": {"rectangle": [0.37, 0.33, 0.695, 0.655]}}
    ],
    "initial_content_scale": 0.8,
    "slots": [{"layer": 1, "power": 1}, {"layer": 2, "power": 1}],
    "similarity": true,
    "misfit_tol": 0.05,
    "interface_tol_factor": 2,
    "lambda_rel_tol": 0.02
  }})"},
        {"class A two-layer nest from one measurement per coefficient", {12}, R"({
  "name": "two-layer-nest-class-a", "kind": "nestRecover", "seed": 1,
  "params": {
    "domain": {"rectangle": [0, 0, 1, 1]},
    "truth": [{"rectangle": [0.2, 0.2, 0.8, 0.8]}, {"rectangle": [0.35, 0.35, 0.65, 0.65]}],
    "content": {"background": 4, "layers": [[20], [-60, 2]], "class": "A"},
    "measurements": [
      {"type": "planeWave", "amplitude": 1, "k": 2, "direction": [1, 1]},
      {"type": "planeWave", "amplitude": 0.7, "k": 2, "direction": [1, -1]},
      {"type": "planeWave", "amplitude": 0.4, "k": 2, "direction": [0, 1]}
    ],
    "data_h": 0.0125, "h_mesh": 0.025,
    "initial": [
      {"polygon": {"rectangle": [0.19, 0.16, 0.83, 0.8]}},
      {"polygon": {"rectangle": [0.37, 0.33, 0.695, 0.655]}}
    ],
    "initial_content_scale": 0.8,
    "slots": [{"layer": 1, "power": 1}, {"layer": 2, "power": 1}, {"layer": 2, "power": 2}],
    "similarity": true,
    "misfit_tol": 0.05
  }})"},
        {"distinct inclusions give distinct Cauchy data", {13}, R"({
  "name": "distinguish-triangles", "kind": "distinguish", "seed": 1,
  "params": {
    "domain": {"rectangle": [0, 0, 1, 1]},
    "first": {"vertices": [[0.3, 0.3], [0.7, 0.35], [0.45, 0.7]]},
    "second": {"vertices": [[0.32, 0.3], [0.7, 0.4], [0.45, 0.7]]},
    "content": {"background": 4, "layers": [[-30, 2]]},
    "measurement": {"type": "planeWave", "k": 2, "direction": [1, 1]},
    "data_h": 0.025, "h_mesh": 0.05,
    "min_gap": 1e-3,
    "family_scales": [1.02, 1.05, 1.1, 1.2]
  }})"},
        {"leading order of the single-inclusion vertex quantities", {14}, R"({
  "name": "leading-order-single", "kind": "admissibility", "seed": 1,
  "params": {
    "mode": "leadingOrder",
    "assumption": "B",
    "domain": {"rectangle": [0, 0, 1, 1]},
    "layers": [{"vertices": [[0.3, 0.3], [0.7, 0.35], [0.45, 0.7]]}],
    "content": {"background": 1, "layers": [[-1, 1]]},
    "scaling": {"k0": 1, "zeta0": 0.5, "direction": [1, 0], "layer_zeta": [0.5], "multipliers": [1, 0.5]},
    "h_mesh": 0.05,
    "eps": [1e-2, 1e-3, 1e-4],
    "ratio_range": [0.8, 1.25]
  }})"},
        {"leading order of the class B nest vertex quantities", {14}, R"({
  "name": "leading-order-nest", "kind": "admissibility", "seed": 1,
  "params": {
    "mode": "leadingOrder",
    "assumption": "D",
    "domain": {"rectangle": [0, 0, 1, 1]},
    "layers": [{"rectangle": [0.2, 0.2, 0.8, 0.8]}, {"rectangle": [0.35, 0.35, 0.65, 0.65]}],
    "content": {"background": 1, "layers": [[-1], [2, 1]], "class": "B"},
    "scaling": {"k0": 1, "zeta0": 0.5, "direction": [1, 0], "layer_zeta": [0.5, 0.5]},
    "h_mesh": 0.05,
    "eps": [1e-2, 1e-3, 1e-4],
    "ratio_range": [0.8, 1.25]
  }})"},
        {"a vanishing content gap fails assumption A", {14}, R"({
  "name": "assumption-a-violated", "kind": "admissibility", "seed": 1,
  "params": {
    "mode": "check",
    "assumption": "A",
    "domain": {"rectangle": [0, 0, 1, 1]},
    "layers": [{"vertices": [[0.3, 0.3], [0.7, 0.35], [0.45, 0.7]]}],
    "content": {"background": 4, "layers": [[4]]},
    "measurements": [{"type": "planeWave", "k": 2, "direction": [1, 1]}],
    "h_mesh": 0.05,
    "expect_pass": false
  }})"},
    };
    return sources;
}

}  // namespace

std::vector<ExperimentTemplate> experimentTemplates()
{
    std::vector<ExperimentTemplate> out;
    for (const auto& s : templateSources()) {
        Json j = Json::parse(s.json);
        out.push_back({j.at("name").get<std::string>(), s.anchor, s.criteria, std::move(j)});
    }
    return out;
}

const ExperimentTemplate& findTemplate(const std::string& name)
{
    static const std::vector<ExperimentTemplate> all = experimentTemplates();
    for (const auto& t : all)
        if (t.name == name) return t;
    throw ConfigError("unknown template '" + name + "'");
}

std::filesystem::path outputRoot()
{
    const char* env = std::getenv("SEMILIN_OUTPUT_ROOT");
    return env && *env ? std::filesystem::path(env) : std::filesystem::path("results");
}

}  // namespace semilin
