#pragma once

#include <stdexcept>
#include <string>

namespace maltls {

// Base class for every error the library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// PEM / DER layer
struct MalformedPem : Error { using Error::Error; };
struct MalformedDer : Error { using Error::Error; };
struct UnsupportedVersion : Error { using Error::Error; };

// pcap / flow layer
struct BadMagic : Error { using Error::Error; };
struct TruncatedRecord : Error { using Error::Error; };
struct EmptyFlow : Error { using Error::Error; };

// TLS layer
struct MalformedRecord : Error { using Error::Error; };
struct NoServerHello : Error { using Error::Error; };

// ML layer
struct EmptyDataset : Error { using Error::Error; };
struct SchemaMismatch : Error { using Error::Error; };
struct TooFewRows : Error { using Error::Error; };

// pipeline
struct NoHandshake : Error { using Error::Error; };

}  // namespace maltls
