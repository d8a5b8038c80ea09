#pragma once

#include <string>

#include "fscap/channels.hpp"
#include "fscap/delay.hpp"
#include "fscap/dual_mdp.hpp"
#include "fscap/graph_bounds.hpp"
#include "fscap/qgraph.hpp"

// JSON (de)serialization. All parsers throw InvalidArgument on malformed input.
namespace fscap::io {

std::string to_json(const UnifilarFsc& channel);
UnifilarFsc channel_from_json(const std::string& text);

/// Channel schema plus a "decode" array mapping each extended state to {"state", "history"}.
std::string to_json(const TransformedChannel& channel);

std::string to_json(const QGraph& g);
QGraph qgraph_from_json(const std::string& text);

std::string to_json(const InputPolicy& policy);
InputPolicy policy_from_json(const std::string& text);

std::string to_json(const GraphTestDistribution& t);
GraphTestDistribution test_distribution_from_json(const std::string& text);

/// {"rho", "h": {"(s,q)": v}, "policy": {"(s,q)": x}, "support": ["(s,q)", ...]} with 0-based indices.
std::string to_json(const BellmanCertificate& cert, std::size_t node_count);
BellmanCertificate certificate_from_json(const std::string& text, std::size_t state_count, std::size_t node_count);

/// Self-contained certificate file: the certificate fields plus "channel", "delay", "qgraph" and "test".
std::string to_json(const CertificateBundle& bundle);
CertificateBundle bundle_from_json(const std::string& text);

std::string to_json(const BoundReport& report);
std::string to_json(const VerificationReport& report, const UnifilarFsc& channel, const QGraph& g);

/// Whole-file helpers.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// Formats a value with 10 significant digits.
std::string format_value(double v);

}  // namespace fscap::io
