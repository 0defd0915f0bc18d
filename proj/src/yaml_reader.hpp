#pragma once

// YAML reading helpers shared by the file formats. Private to the library.

#include <initializer_list>
#include <set>
#include <string>

#include <yaml-cpp/yaml.h>

#include "iosmp/io.hpp"

namespace iosmp::io::detail
{
class Reader
{
public:
    explicit Reader(std::string name) : name_(std::move(name))
    {
    }

    YAML::Node load(const std::string &text) const
    {
        try
        {
            YAML::Node root = YAML::Load(text);
            if (!root.IsMap())
                fail(root, "expected a mapping at the top level");
            return root;
        }
        catch (const YAML::ParserException &e)
        {
            throw FormatError(name_, e.mark.line + 1, e.mark.column + 1, e.msg);
        }
    }

    [[noreturn]] void fail(const YAML::Node &at, const std::string &message) const
    {
        const auto m = at.Mark();
        if (m.is_null())
            throw FormatError(name_, 0, 0, message);
        throw FormatError(name_, m.line + 1, m.column + 1, message);
    }

    YAML::Node need(const YAML::Node &map, const char *key) const
    {
        const YAML::Node n = map[key];
        if (!n)
            fail(map, std::string("missing field '") + key + "'");
        return n;
    }

    void expectMap(const YAML::Node &n, const char *what) const
    {
        if (!n.IsMap())
            fail(n, std::string(what) + " must be a mapping");
    }

    /// Rejects keys outside `allowed` so typos surface instead of being ignored.
    void onlyKeys(const YAML::Node &map, std::initializer_list<const char *> allowed) const
    {
        expectMap(map, "value");
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto &kv : map)
        {
            const auto key = kv.first.as<std::string>();
            if (!ok.count(key))
                fail(kv.first, "unknown field '" + key + "'");
        }
    }

    template <class T>
    T scalar(const YAML::Node &n, const char *what) const
    {
        if (!n.IsScalar())
            fail(n, std::string(what) + " must be a scalar");
        try
        {
            return n.as<T>();
        }
        catch (const YAML::Exception &)
        {
            fail(n, std::string("cannot read ") + what + " from '" + n.Scalar() + "'");
        }
    }

    double real(const YAML::Node &n, const char *what) const
    {
        return scalar<double>(n, what);
    }

    std::uint64_t unsignedInt(const YAML::Node &n, const char *what) const
    {
        if (n.IsScalar() && !n.Scalar().empty() && n.Scalar()[0] == '-')
            fail(n, std::string(what) + " must be non-negative");
        return scalar<std::uint64_t>(n, what);
    }

    Vec vec(const YAML::Node &n, const char *what, Eigen::Index size = -1) const
    {
        if (!n.IsSequence())
            fail(n, std::string(what) + " must be a list of numbers");
        if (size >= 0 && static_cast<Eigen::Index>(n.size()) != size)
            fail(n, std::string(what) + " must have " + std::to_string(size) + " entries, found " +
                        std::to_string(n.size()));
        Vec v(static_cast<Eigen::Index>(n.size()));
        for (std::size_t i = 0; i < n.size(); ++i)
            v[static_cast<Eigen::Index>(i)] = real(n[i], what);
        return v;
    }

    Eigen::Vector3d vec3(const YAML::Node &n, const char *what) const
    {
        return vec(n, what, 3);
    }

    void checkFormat(const YAML::Node &root, const char *expected) const
    {
        const YAML::Node f = root["format"];
        if (f && scalar<std::string>(f, "format") != expected)
            fail(f, "expected format '" + std::string(expected) + "', found '" + f.Scalar() + "'");
    }

    /// Runs a constructor that validates with InputError and re-anchors failures at `at`.
    template <class F>
    auto anchored(const YAML::Node &at, F &&f) const
    {
        try
        {
            return f();
        }
        catch (const InputError &e)
        {
            fail(at, e.what());
        }
    }

    const std::string &name() const
    {
        return name_;
    }

private:
    std::string name_;
};

optimizer::OptimizerConfig optimizerFrom(const Reader &r, const YAML::Node &n);

/// Flow-style list of shortest round-trip numbers.
std::string list(const Vec &v);
}  // namespace iosmp::io::detail
