#include "sq/engine.hpp"

namespace sq {
namespace {

Json step_to_json(const ClaimOutcome& c) {
  return Json{{"r", c.r},
              {"next_r", c.witness.ratio_bound},
              {"V1", matrix_to_json(c.subspace_V1.basis())},
              {"p", vector_to_json(c.p)},
              {"s", c.s},
              {"round_branch", c.round_branch},
              {"parity_flip", c.parity_flip},
              {"search_estimate", to_json(c.search_estimate)},
              {"tries", c.tries},
              {"witness", to_json(c.witness)}};
}

}  // namespace

Json to_json(const TheoremCertificate& cert) {
  Json trace = Json::array();
  for (const auto& step : cert.trace) trace.push_back(step_to_json(step));
  Json final_part{{"dim", cert.E_final.dim()},
                  {"E", matrix_to_json(cert.E_final.form())},
                  {"s_final", cert.s_final},
                  {"s_farthest", cert.s_farthest},
                  {"bound", cert.bound}};
  if (cert.final_body) {
    try {
      final_part["body"] = body_to_json(*cert.final_body);
    } catch (const UnsupportedRepresentation&) {
      final_part["body"] = nullptr;
    }
  }
  return Json{{"schema", 1},
              {"kind", cert.corollary.is_null() ? "theorem" : "corollary"},
              {"k", cert.k},
              {"n", cert.n},
              {"input", Json{{"witness", matrix_to_json(cert.input_witness.form())},
                             {"ratio", to_json(cert.input_ratio)}}},
              {"frame", to_json(cert.frame)},
              {"trace", trace},
              {"final", final_part},
              {"verification", to_json(cert.report)},
              {"verified", cert.verified},
              {"corollary", cert.corollary}};
}

TheoremCertificate certificate_from_json(const Json& j) {
  if (!j.is_object() || j.value("schema", 0) != 1) throw InvalidArgument("certificate: unsupported schema");
  TheoremCertificate cert;
  cert.k = j.at("k").get<int>();
  cert.n = j.at("n").get<int>();
  cert.frame = frame_from_json(j.at("frame"));
  const auto& fin = j.at("final");
  cert.E_final = Ellipsoid(matrix_from_json(fin.at("E")));
  cert.s_final = fin.at("s_final").get<double>();
  cert.s_farthest = fin.at("s_farthest").get<double>();
  cert.bound = fin.at("bound").get<double>();
  if (fin.contains("body") && !fin.at("body").is_null()) cert.final_body = body_from_json(fin.at("body"));
  const auto& input = j.at("input");
  cert.input_witness = Ellipsoid(matrix_from_json(input.at("witness")));
  cert.input_ratio = mc_estimate_from_json(input.at("ratio"));
  cert.verified = j.at("verified").get<bool>();
  cert.corollary = j.at("corollary");
  return cert;
}

}  // namespace sq
