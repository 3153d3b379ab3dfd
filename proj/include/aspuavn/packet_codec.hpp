#pragma once

// Line-oriented text encoding of packets. Doubles are written as hex floats so
// the encoding round-trips bit-exactly.

#include "domain.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>

namespace aspuavn
{

namespace codec_detail
{

inline std::string hexfloat(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

inline void write_ids(std::ostream& os, const std::vector<UavId>& ids)
{
    os << ids.size();
    for (auto id : ids)
        os << ' ' << id.value;
}

class Reader
{
public:
    explicit Reader(std::string_view text) : in_(std::string(text)) {}

    std::string word()
    {
        std::string w;
        if (!(in_ >> w))
            throw Error("packet decode: truncated input");
        return w;
    }

    template <typename T>
    T integer()
    {
        const std::string w = word();
        T v{};
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc{} || p != w.data() + w.size())
            throw Error("packet decode: bad integer '" + w + "'");
        return v;
    }

    double real()
    {
        const std::string w = word();
        char* end = nullptr;
        const double v = std::strtod(w.c_str(), &end);
        if (end != w.c_str() + w.size())
            throw Error("packet decode: bad real '" + w + "'");
        return v;
    }

    UavId id() { return UavId{integer<std::uint32_t>()}; }

    std::vector<UavId> ids()
    {
        const auto n = integer<std::size_t>();
        std::vector<UavId> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(id());
        return out;
    }

    void expect_end()
    {
        std::string extra;
        if (in_ >> extra)
            throw Error("packet decode: trailing data '" + extra + "'");
    }

private:
    std::istringstream in_;
};

} // namespace codec_detail

inline std::string encode(const Packet& p)
{
    using codec_detail::hexfloat;
    using codec_detail::write_ids;
    std::ostringstream os;
    os << to_string(p.kind()) << ' ' << p.origin.value << ' ' << p.sender.value << ' '
       << hexfloat(p.timestamp) << ' ' << hexfloat(p.tx_power) << ' ';
    write_ids(os, p.path);
    os << ' ' << p.cursor;
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Rreq>)
            {
                os << ' ' << b.id << ' ' << b.src.value << ' ' << b.dst.value << ' ' << b.hop_count
                   << ' ';
                write_ids(os, b.path_so_far);
                os << ' ' << b.dst_seq;
            }
            else if constexpr (std::is_same_v<T, Rrep>)
            {
                os << ' ';
                write_ids(os, b.route);
                os << ' ' << b.dst_seq << ' ' << b.hop_count << ' ' << b.rreq_id;
            }
            else if constexpr (std::is_same_v<T, Hello>)
                os << ' ' << b.route_id << ' ' << b.probe_round;
            else if constexpr (std::is_same_v<T, Confirm>)
                os << ' ' << b.route_id << ' ' << b.probe_round << ' ' << hexfloat(b.hello_sent);
            else if constexpr (std::is_same_v<T, Test>)
                os << ' ' << b.route_id << ' ' << b.seq << ' ' << b.interval;
            else if constexpr (std::is_same_v<T, Data>)
                os << ' ' << b.seq << ' ' << b.payload_bytes << ' ' << b.session;
            else if constexpr (std::is_same_v<T, Alert>)
                os << ' ' << b.blacklisted.value;
        },
        p.body);
    return os.str();
}

inline Packet decode(std::string_view line)
{
    codec_detail::Reader r(line);
    const std::string kind = r.word();
    Packet p;
    p.origin = r.id();
    p.sender = r.id();
    p.timestamp = r.real();
    p.tx_power = r.real();
    p.path = r.ids();
    p.cursor = r.integer<std::uint32_t>();
    if (kind == "RREQ")
    {
        Rreq b;
        b.id = r.integer<std::uint64_t>();
        b.src = r.id();
        b.dst = r.id();
        b.hop_count = r.integer<std::uint32_t>();
        b.path_so_far = r.ids();
        b.dst_seq = r.integer<std::uint64_t>();
        p.body = std::move(b);
    }
    else if (kind == "RREP")
    {
        Rrep b;
        b.route = r.ids();
        b.dst_seq = r.integer<std::uint64_t>();
        b.hop_count = r.integer<std::uint32_t>();
        b.rreq_id = r.integer<std::uint64_t>();
        p.body = std::move(b);
    }
    else if (kind == "HELLO")
        p.body = Hello{r.integer<std::uint64_t>(), r.integer<std::uint32_t>()};
    else if (kind == "CONFIRM")
    {
        Confirm b;
        b.route_id = r.integer<std::uint64_t>();
        b.probe_round = r.integer<std::uint32_t>();
        b.hello_sent = r.real();
        p.body = b;
    }
    else if (kind == "TEST")
    {
        Test b;
        b.route_id = r.integer<std::uint64_t>();
        b.seq = r.integer<std::uint32_t>();
        b.interval = r.integer<std::uint32_t>();
        p.body = b;
    }
    else if (kind == "DATA")
    {
        Data b;
        b.seq = r.integer<std::uint64_t>();
        b.payload_bytes = r.integer<std::uint32_t>();
        b.session = r.integer<std::uint64_t>();
        p.body = b;
    }
    else if (kind == "ALERT")
        p.body = Alert{r.id()};
    else
        throw Error("packet decode: unknown kind '" + kind + "'");
    r.expect_end();
    return p;
}

} // namespace aspuavn
