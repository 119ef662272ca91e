// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eovsim
{

// Simulated time in milliseconds on a single virtual clock.
using SimTime = double;
using NodeId = int;

enum class ErrorKind
{
    Config,
    HashChainMismatch,
    SequenceGap,
    UnknownNode,
    TooFewPeers,
    EndorsementTimeout,
    EndorsementMismatch,
    UnknownTx,
    EmptyWindow,
    Invariant,
    Io,
};

inline char const*
error_kind_name(ErrorKind k)
{
    switch (k)
    {
    case ErrorKind::Config:
        return "ConfigError";
    case ErrorKind::HashChainMismatch:
        return "HashChainMismatch";
    case ErrorKind::SequenceGap:
        return "SequenceGap";
    case ErrorKind::UnknownNode:
        return "UnknownNode";
    case ErrorKind::TooFewPeers:
        return "TooFewPeers";
    case ErrorKind::EndorsementTimeout:
        return "EndorsementTimeout";
    case ErrorKind::EndorsementMismatch:
        return "EndorsementMismatch";
    case ErrorKind::UnknownTx:
        return "UnknownTx";
    case ErrorKind::EmptyWindow:
        return "EmptyWindow";
    case ErrorKind::Invariant:
        return "InvariantViolation";
    case ErrorKind::Io:
        return "IoError";
    }
    return "SimError";
}

class SimError : public std::runtime_error
{
  public:
    SimError(ErrorKind kind, std::string const& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what)
        , mKind(kind)
    {
    }

    ErrorKind
    kind() const
    {
        return mKind;
    }

  private:
    ErrorKind mKind;
};

class ConfigError : public SimError
{
  public:
    explicit ConfigError(std::string const& what)
        : SimError(ErrorKind::Config, what)
    {
    }
};

// FNV-1a 64-bit over a canonical byte encoding. Not cryptographic; the chain
// only needs a stable, platform-independent content hash.
class Digest
{
  public:
    Digest&
    feed_byte(uint8_t b)
    {
        mHash ^= b;
        mHash *= 1099511628211ULL;
        return *this;
    }

    Digest&
    feed(std::string_view s)
    {
        for (char c : s)
        {
            feed_byte(static_cast<uint8_t>(c));
        }
        // Separator keeps ("ab","c") distinct from ("a","bc").
        feed_byte(0);
        return *this;
    }

    Digest&
    feed_u64(uint64_t v)
    {
        for (int i = 0; i < 8; ++i)
        {
            feed_byte(static_cast<uint8_t>(v >> (8 * i)));
        }
        return *this;
    }

    uint64_t
    value() const
    {
        return mHash;
    }

  private:
    uint64_t mHash = 14695981039346656037ULL;
};

inline std::string
hex64(uint64_t v)
{
    static char const* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i)
    {
        s[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

} // namespace eovsim
