#include "iosmp/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "iosmp/format.hpp"
#include "yaml_reader.hpp"

namespace iosmp::io
{
namespace
{
std::string located(const std::string &file, int line, int column, const std::string &message)
{
    std::string out = file;
    if (line > 0)
        out += ":" + std::to_string(line) + ":" + std::to_string(column);
    return out + ": " + message;
}
}  // namespace

FormatError::FormatError(const std::string &file, int line, int column, const std::string &message)
    : std::runtime_error(located(file, line, column, message)), file_(file), line_(line), column_(column)
{
}

namespace
{
using detail::list;
using detail::optimizerFrom;
using detail::Reader;

robot::SerialArmModel armFrom(const Reader &r, const YAML::Node &root)
{
    r.onlyKeys(root, {"format", "base", "joints", "bodies", "endEffector"});
    const Eigen::Vector3d base = root["base"] ? r.vec3(root["base"], "base") : Eigen::Vector3d::Zero();
    const YAML::Node js = r.need(root, "joints");
    if (!js.IsSequence() || js.size() == 0)
        r.fail(js, "joints must be a non-empty list");
    std::vector<robot::Joint> joints;
    for (const auto &jn : js)
    {
        r.onlyKeys(jn, {"axis", "offset", "limits"});
        robot::Joint j;
        j.axis = r.vec3(r.need(jn, "axis"), "axis");
        if (jn["offset"])
            j.offset = r.vec3(jn["offset"], "offset");
        const Vec lim = r.vec(r.need(jn, "limits"), "limits", 2);
        j.lower = lim[0];
        j.upper = lim[1];
        joints.push_back(j);
    }
    std::vector<robot::Body> bodies;
    const YAML::Node bs = r.need(root, "bodies");
    if (!bs.IsSequence())
        r.fail(bs, "bodies must be a list");
    for (const auto &bn : bs)
    {
        r.onlyKeys(bn, {"link", "a", "b", "radius"});
        bodies.push_back(robot::Body{r.scalar<std::size_t>(r.need(bn, "link"), "link"), r.vec3(r.need(bn, "a"), "a"),
                                     r.vec3(r.need(bn, "b"), "b"), r.real(r.need(bn, "radius"), "radius")});
    }
    const YAML::Node ee = r.need(root, "endEffector");
    r.onlyKeys(ee, {"link", "point"});
    const auto eeLink = r.scalar<std::size_t>(r.need(ee, "link"), "link");
    const Eigen::Vector3d eePoint = r.vec3(r.need(ee, "point"), "point");
    return r.anchored(root, [&] { return robot::SerialArmModel(joints, bodies, eeLink, eePoint, base); });
}

// ---------------------------------------------------------------- writing

std::string yamlNumber(double x)
{
    // YAML spells infinities .inf; formatDouble's "inf" would read back as a string.
    if (std::isinf(x))
        return x > 0 ? ".inf" : "-.inf";
    return formatDouble(x);
}

std::string limits(double lo, double hi)
{
    return "[" + yamlNumber(lo) + ", " + yamlNumber(hi) + "]";
}

std::string armBody(const robot::SerialArmModel &arm, const std::string &pad)
{
    std::ostringstream out;
    out << pad << "base: " << list(arm.base()) << '\n';
    out << pad << "joints:\n";
    for (const auto &j : arm.joints())
        out << pad << "  - {axis: " << list(j.axis) << ", offset: " << list(j.offset)
            << ", limits: " << limits(j.lower, j.upper) << "}\n";
    out << pad << "bodies:\n";
    for (const auto &b : arm.bodies())
        out << pad << "  - {link: " << b.link << ", a: " << list(b.a) << ", b: " << list(b.b)
            << ", radius: " << formatDouble(b.radius) << "}\n";
    out << pad << "endEffector: {link: " << arm.endEffectorLink() << ", point: " << list(arm.endEffectorPoint())
        << "}\n";
    return out.str();
}

const char *originName(roadmap::Origin o)
{
    return roadmap::toString(o);
}
}  // namespace

namespace detail
{
optimizer::OptimizerConfig optimizerFrom(const Reader &r, const YAML::Node &n)
{
    r.onlyKeys(n, {"format", "mu0", "muUp", "lambda0", "tau", "tauInner", "maxOuter", "maxInner", "waypoints",
                   "form", "goalMargin", "clearanceMargin", "resolutionScale"});
    optimizer::OptimizerConfig c;
    if (n["mu0"])
        c.mu0 = r.real(n["mu0"], "mu0");
    if (n["muUp"])
        c.muUp = r.real(n["muUp"], "muUp");
    if (n["lambda0"])
        c.lambda0 = r.real(n["lambda0"], "lambda0");
    if (n["tau"])
        c.tau = r.real(n["tau"], "tau");
    if (n["tauInner"])
        c.tauInner = r.real(n["tauInner"], "tauInner");
    if (n["maxOuter"])
        c.maxOuter = r.scalar<int>(n["maxOuter"], "maxOuter");
    if (n["maxInner"])
        c.maxInner = r.scalar<int>(n["maxInner"], "maxInner");
    if (n["waypoints"])
        c.waypoints = r.scalar<std::size_t>(n["waypoints"], "waypoints");
    if (n["goalMargin"])
        c.goalMargin = r.real(n["goalMargin"], "goalMargin");
    if (n["clearanceMargin"])
        c.clearanceMargin = r.real(n["clearanceMargin"], "clearanceMargin");
    if (n["resolutionScale"])
        c.resolutionScale = r.scalar<int>(n["resolutionScale"], "resolutionScale");
    if (n["form"])
    {
        const auto f = r.scalar<std::string>(n["form"], "form");
        if (f == "signedDistance")
            c.form = robot::ClearanceForm::SignedDistance;
        else if (f == "signedSquared")
            c.form = robot::ClearanceForm::SignedSquared;
        else if (f == "checker")
            c.form.reset();
        else
            r.fail(n["form"], "form must be signedDistance, signedSquared or checker");
    }
    r.anchored(n, [&] {
        c.validate();
        return 0;
    });
    return c;
}

std::string list(const Vec &v)
{
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        if (i)
            out += ", ";
        out += formatDouble(v[i]);
    }
    return out + "]";
}

}  // namespace detail


// ---------------------------------------------------------------- scenario

Scenario parseScenario(const std::string &text, const std::string &name, const std::filesystem::path &baseDir)
{
    const Reader r(name);
    const YAML::Node root = r.load(text);
    r.checkFormat(root, "iosmp-scenario/1");
    r.onlyKeys(root, {"format", "space", "robot", "obstacles", "start", "goal", "seed", "checking"});

    Scenario s;
    const YAML::Node space = r.need(root, "space");
    r.onlyKeys(space, {"dim", "bounds"});
    const YAML::Node dimNode = r.need(space, "dim");
    const auto dim = r.scalar<int>(dimNode, "dim");
    if (dim < 1)
        r.fail(dimNode, "dim must be positive");

    const YAML::Node robotNode = r.need(root, "robot");
    r.onlyKeys(robotNode, {"type", "file", "model"});
    const auto type = r.scalar<std::string>(r.need(robotNode, "type"), "type");
    if (type == "point")
    {
        const YAML::Node b = r.need(space, "bounds");
        r.onlyKeys(b, {"lower", "upper"});
        robot::Bounds bounds{r.vec(r.need(b, "lower"), "lower", dim), r.vec(r.need(b, "upper"), "upper", dim)};
        for (int i = 0; i < dim; ++i)
            if (!(bounds.lower[i] < bounds.upper[i]))
                r.fail(b, "bounds must satisfy lower < upper in every coordinate");
        s.robot = robot::PointRobotModel{bounds};
    }
    else if (type == "arm")
    {
        if (robotNode["file"])
        {
            s.armFile = r.scalar<std::string>(robotNode["file"], "file");
            const auto armPath = baseDir / s.armFile;
            if (!std::filesystem::is_regular_file(armPath))
                r.fail(robotNode["file"], "cannot read arm file '" + armPath.string() + "'");
            s.robot = readArm(armPath);
        }
        else if (robotNode["model"])
        {
            s.robot = armFrom(r, robotNode["model"]);
        }
        else
        {
            r.fail(robotNode, "arm robot needs a 'file' or an inline 'model'");
        }
        if (robot::dimOf(s.robot) != static_cast<std::size_t>(dim))
            r.fail(dimNode, "dim " + std::to_string(dim) + " does not match the arm's " +
                                std::to_string(robot::dimOf(s.robot)) + " joints");
    }
    else
    {
        r.fail(robotNode["type"], "robot type must be 'point' or 'arm'");
    }
    const bool arm = type == "arm";
    const Eigen::Index workspace = arm ? 3 : dim;

    if (const YAML::Node obs = root["obstacles"])
    {
        if (!obs.IsSequence())
            r.fail(obs, "obstacles must be a list");
        for (const auto &o : obs)
        {
            r.onlyKeys(o, {"type", "center", "axis", "radius"});
            const auto kind = r.scalar<std::string>(r.need(o, "type"), "type");
            geometry::ObstaclePrimitive prim;
            if (kind == "sphere")
            {
                prim = geometry::Hypersphere{r.vec(r.need(o, "center"), "center", workspace),
                                             r.real(r.need(o, "radius"), "radius")};
            }
            else if (kind == "capsule")
            {
                const YAML::Node ax = r.need(o, "axis");
                if (!ax.IsSequence() || ax.size() != 2)
                    r.fail(ax, "capsule axis must list two endpoints");
                prim = geometry::Capsule{geometry::Segment{r.vec3(ax[0], "axis"), r.vec3(ax[1], "axis")},
                                         r.real(r.need(o, "radius"), "radius")};
            }
            else
            {
                r.fail(o["type"], "obstacle type must be 'sphere' or 'capsule'");
            }
            r.anchored(o, [&] {
                geometry::validate(prim);
                return 0;
            });
            s.obstacles.push_back(std::move(prim));
        }
    }

    s.start = r.vec(r.need(root, "start"), "start", dim);
    const YAML::Node goal = r.need(root, "goal");
    r.onlyKeys(goal, {"config", "region"});
    if (goal["config"] && goal["region"])
        r.fail(goal, "goal must have exactly one of 'config' or 'region'");
    if (goal["config"])
    {
        s.goal = SingleConfigGoal{r.vec(goal["config"], "goal config", dim)};
    }
    else if (goal["region"])
    {
        const YAML::Node g = goal["region"];
        r.onlyKeys(g, {"center", "radius"});
        const double radius = r.real(r.need(g, "radius"), "radius");
        if (!(radius > 0.0))
            r.fail(g["radius"], "goal region radius must be positive");
        s.goal = WorkspaceRegionGoal{r.vec(r.need(g, "center"), "center", workspace), radius};
    }
    else
    {
        r.fail(goal, "goal must have exactly one of 'config' or 'region'");
    }
    s.seed = root["seed"] ? r.unsignedInt(root["seed"], "seed") : 0;

    if (const YAML::Node c = root["checking"])
    {
        r.onlyKeys(c, {"resolutionStep", "minResolution", "tolerance"});
        if (c["resolutionStep"])
            s.checking.resolutionStep = r.real(c["resolutionStep"], "resolutionStep");
        if (c["minResolution"])
            s.checking.minResolution = r.scalar<int>(c["minResolution"], "minResolution");
        if (c["tolerance"])
            s.checking.tolerance = r.real(c["tolerance"], "tolerance");
        if (!(s.checking.resolutionStep > 0.0) || s.checking.minResolution < 1 || !(s.checking.tolerance >= 0.0))
            r.fail(c, "checking needs resolutionStep > 0, minResolution >= 1 and tolerance >= 0");
    }
    r.anchored(root, [&] {
        validateScenario(s);
        return 0;
    });
    return s;
}

std::string formatScenario(const Scenario &s)
{
    std::ostringstream out;
    out << "format: iosmp-scenario/1\n";
    out << "space:\n  dim: " << s.dim() << '\n';
    const auto &bounds = robot::boundsOf(s.robot);
    out << "  bounds:\n    lower: " << list(bounds.lower) << "\n    upper: " << list(bounds.upper) << '\n';
    if (const auto *arm = std::get_if<robot::SerialArmModel>(&s.robot))
    {
        out << "robot:\n  type: arm\n";
        if (!s.armFile.empty())
            out << "  file: " << YAML::Dump(YAML::Node(s.armFile)) << '\n';
        else
            out << "  model:\n" << armBody(*arm, "    ");
    }
    else
    {
        out << "robot:\n  type: point\n";
    }
    if (s.obstacles.empty())
        out << "obstacles: []\n";
    else
        out << "obstacles:\n";
    for (const auto &o : s.obstacles)
    {
        if (const auto *h = std::get_if<geometry::Hypersphere>(&o))
            out << "  - {type: sphere, center: " << list(h->center) << ", radius: " << formatDouble(h->radius) << "}\n";
        else
        {
            const auto &c = std::get<geometry::Capsule>(o);
            out << "  - {type: capsule, axis: [" << list(c.axis.a) << ", " << list(c.axis.b)
                << "], radius: " << formatDouble(c.radius) << "}\n";
        }
    }
    out << "start: " << list(s.start) << '\n';
    if (const auto *g = std::get_if<SingleConfigGoal>(&s.goal))
        out << "goal:\n  config: " << list(g->q) << '\n';
    else
    {
        const auto &region = std::get<WorkspaceRegionGoal>(s.goal);
        out << "goal:\n  region: {center: " << list(region.center) << ", radius: " << formatDouble(region.radius)
            << "}\n";
    }
    out << "seed: " << s.seed << '\n';
    const robot::CheckOptions defaults;
    if (s.checking.resolutionStep != defaults.resolutionStep || s.checking.minResolution != defaults.minResolution ||
        s.checking.tolerance != defaults.tolerance)
        out << "checking: {resolutionStep: " << formatDouble(s.checking.resolutionStep)
            << ", minResolution: " << s.checking.minResolution
            << ", tolerance: " << formatDouble(s.checking.tolerance) << "}\n";
    return out.str();
}

Scenario readScenario(const std::filesystem::path &file)
{
    return parseScenario(readText(file), file.string(), file.parent_path());
}

void writeScenario(const std::filesystem::path &file, const Scenario &s)
{
    writeText(file, formatScenario(s));
}

// ---------------------------------------------------------------- arm

robot::SerialArmModel parseArm(const std::string &text, const std::string &name)
{
    const Reader r(name);
    const YAML::Node root = r.load(text);
    r.checkFormat(root, "iosmp-arm/1");
    return armFrom(r, root);
}

std::string formatArm(const robot::SerialArmModel &arm)
{
    return "format: iosmp-arm/1\n" + armBody(arm, "");
}

robot::SerialArmModel readArm(const std::filesystem::path &file)
{
    return parseArm(readText(file), file.string());
}

// ---------------------------------------------------------------- path

Path parsePath(const std::string &text, const std::string &name)
{
    const Reader r(name);
    const YAML::Node root = r.load(text);
    r.checkFormat(root, "iosmp-path/1");
    r.onlyKeys(root, {"format", "waypoints"});
    const YAML::Node w = r.need(root, "waypoints");
    if (!w.IsSequence() || w.size() < 2)
        r.fail(w, "waypoints must list at least two configurations");
    Path p;
    for (const auto &q : w)
    {
        p.waypoints.push_back(r.vec(q, "waypoint", p.empty() ? -1 : p.front().size()));
        if (p.waypoints.back().size() == 0)
            r.fail(q, "waypoint must not be empty");
    }
    return p;
}

std::string formatPath(const Path &p)
{
    std::string out = "format: iosmp-path/1\nwaypoints:\n";
    for (const auto &q : p.waypoints)
        out += "  - " + list(q) + "\n";
    return out;
}

Path readPath(const std::filesystem::path &file)
{
    return parsePath(readText(file), file.string());
}

// ---------------------------------------------------------------- optimizer config

optimizer::OptimizerConfig parseOptimizerConfig(const std::string &text, const std::string &name)
{
    const Reader r(name);
    const YAML::Node root = r.load(text);
    r.checkFormat(root, "iosmp-optimizer/1");
    return optimizerFrom(r, root);
}

std::string formatOptimizerConfig(const optimizer::OptimizerConfig &c, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    std::ostringstream out;
    out << pad << "mu0: " << formatDouble(c.mu0) << '\n'
        << pad << "muUp: " << formatDouble(c.muUp) << '\n'
        << pad << "lambda0: " << formatDouble(c.lambda0) << '\n'
        << pad << "tau: " << formatDouble(c.tau) << '\n'
        << pad << "tauInner: " << formatDouble(c.tauInner) << '\n'
        << pad << "maxOuter: " << c.maxOuter << '\n'
        << pad << "maxInner: " << c.maxInner << '\n'
        << pad << "waypoints: " << c.waypoints << '\n'
        << pad << "form: "
        << (!c.form ? "checker" : *c.form == robot::ClearanceForm::SignedDistance ? "signedDistance" : "signedSquared")
        << '\n'
        << pad << "goalMargin: " << formatDouble(c.goalMargin) << '\n'
        << pad << "clearanceMargin: " << formatDouble(c.clearanceMargin) << '\n'
        << pad << "resolutionScale: " << c.resolutionScale << '\n';
    return out.str();
}

// ---------------------------------------------------------------- roadmap

std::string formatRoadmap(const roadmap::Roadmap &rm)
{
    std::ostringstream out;
    out << "format: iosmp-roadmap/1\n";
    out << "samplesDrawn: " << rm.samplesDrawn() << '\n';
    out << "vertices:\n";
    for (const auto &v : rm.vertices())
        out << "  - {id: " << v.id << ", origin: " << originName(v.origin) << ", goal: " << (v.goal ? "true" : "false")
            << ", q: " << list(v.q) << "}\n";
    if (rm.edges().empty())
        out << "edges: []\n";
    else
        out << "edges:\n";
    for (const auto &e : rm.edges())
        out << "  - [" << e.u << ", " << e.v << ", " << formatDouble(e.length) << "]\n";
    return out.str();
}

RoadmapDump parseRoadmap(const std::string &text, const std::string &name)
{
    const Reader r(name);
    const YAML::Node root = r.load(text);
    r.checkFormat(root, "iosmp-roadmap/1");
    RoadmapDump d;
    const YAML::Node vs = r.need(root, "vertices");
    if (!vs.IsSequence())
        r.fail(vs, "vertices must be a list");
    for (const auto &v : vs)
    {
        const auto id = r.scalar<std::size_t>(r.need(v, "id"), "id");
        if (id != d.vertices.size())
            r.fail(v, "vertex ids must count up from 0");
        d.vertices.push_back(r.vec(r.need(v, "q"), "q"));
    }
    const YAML::Node es = r.need(root, "edges");
    if (!es.IsSequence())
        r.fail(es, "edges must be a list");
    for (const auto &e : es)
    {
        if (!e.IsSequence() || e.size() < 2)
            r.fail(e, "edge must be [u, v, length]");
        const auto u = r.scalar<std::size_t>(e[0], "edge endpoint");
        const auto v = r.scalar<std::size_t>(e[1], "edge endpoint");
        if (u >= d.vertices.size() || v >= d.vertices.size())
            r.fail(e, "edge endpoint out of range");
        d.edges.emplace_back(u, v);
    }
    return d;
}

// ---------------------------------------------------------------- files

std::string readText(const std::filesystem::path &file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw FormatError(file.string(), 0, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeText(const std::filesystem::path &file, const std::string &text)
{
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    const auto tmp = std::filesystem::path(file.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out)
            throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}
}  // namespace iosmp::io
