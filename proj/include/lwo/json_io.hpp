#pragma once

#include "lwo/discretize.hpp"
#include "lwo/gap.hpp"
#include "lwo/inverse.hpp"
#include "lwo/multiset.hpp"
#include "lwo/randmat.hpp"
#include "lwo/walk.hpp"

#include <json.hpp>

// JSON encoding of every artifact the command line reads or writes. Rationals
// and big integers travel as decimal strings ("p/q", or "p" when q = 1);
// machine-sized counts and coefficients as JSON integers. Decoders throw
// ParseError on anything malformed.
namespace lwo::io {

using json = nlohmann::ordered_json;

json encode(const Rational& x);
json encode(const BigInt& x);
json encode(const Multiset& v);
json encode(const Distribution& d);
json encode(const Gap& g);
json encode(const CoverageReport& c);
json encode(const CubeCertificate& c);
json encode(const DilateCoverCertificate& c);
json encode(const GapCertificate& c);
json encode(const SecondInverseFailure& f);
json encode(const VerificationReport& r);
json encode(const DiscretizationResult& r);
json encode(const DiscretizationReport& r);
json encode(const DiscretizationFailure& f);
json encode(const McEstimate& e);

Rational decode_rational(const json& j);
BigInt decode_bigint(const json& j);
Multiset decode_multiset(const json& j);
Distribution decode_distribution(const json& j);
Gap decode_gap(const json& j);
CubeCertificate decode_cube(const json& j);
DilateCoverCertificate decode_dilate(const json& j);
GapCertificate decode_gap_certificate(const json& j);
DiscretizationResult decode_discretization(const json& j);

json parse(std::string_view text);
// Two-space indented text with a trailing newline.
std::string dump(const json& j);

}  // namespace lwo::io
