#include "costar/protocol.hpp"

#include "costar/text.hpp"

#include <istream>
#include <ostream>

namespace costar::protocol {

using json = nlohmann::json;

namespace {

template <typename T>
T required(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw std::invalid_argument(std::string("missing field '") + key + "'");
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(std::string("field '") + key + "' has the wrong type");
    }
}

std::size_t positive_count(const json& j, const char* key, std::size_t fallback) {
    const auto it = j.find(key);
    if (it == j.end()) {
        return fallback;
    }
    if (!it->is_number_unsigned() || it->get<std::size_t>() == 0) {
        throw std::invalid_argument(std::string("field '") + key + "' must be a positive integer");
    }
    return it->get<std::size_t>();
}

} // namespace

json descriptor_to_json(const BackendDescriptor& d) {
    return {
        {"name", d.name},
        {"scheme", std::string(to_string(d.scheme))},
        {"instance_id", d.instance_id},
        {"training",
         {{"epochs", d.training.epochs},
          {"learning_rate", d.training.learning_rate},
          {"batch_size", d.training.batch_size},
          {"optimizer", d.training.optimizer},
          {"eval_every_epoch", d.training.eval_every_epoch}}},
        {"decoding", d.decoding},
        {"concurrency", d.concurrent ? "concurrent" : "serial"},
    };
}

BackendDescriptor descriptor_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("descriptor must be an object");
    }
    BackendDescriptor d;
    d.name = required<std::string>(j, "name");
    const auto scheme = scheme_from_string(required<std::string>(j, "scheme"));
    if (!scheme) {
        throw std::invalid_argument("unknown scheme in descriptor");
    }
    d.scheme = *scheme;
    d.instance_id = required<int>(j, "instance_id");
    if (const auto it = j.find("training"); it != j.end()) {
        const json& t = *it;
        d.training.epochs = t.value("epochs", d.training.epochs);
        d.training.learning_rate = t.value("learning_rate", d.training.learning_rate);
        d.training.batch_size = t.value("batch_size", d.training.batch_size);
        d.training.optimizer = t.value("optimizer", d.training.optimizer);
        d.training.eval_every_epoch = t.value("eval_every_epoch", d.training.eval_every_epoch);
    }
    d.decoding = j.value("decoding", std::string());
    const std::string concurrency = j.value("concurrency", std::string("serial"));
    if (concurrency != "serial" && concurrency != "concurrent") {
        throw std::invalid_argument("concurrency must be 'serial' or 'concurrent'");
    }
    d.concurrent = concurrency == "concurrent";
    d.validate();
    return d;
}

json request_to_json(const GenerationRequest& req) {
    return {{"prefix", req.prefix},
            {"num_candidates", req.num_candidates},
            {"max_new_tokens", req.max_new_tokens}};
}

GenerationRequest request_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("request must be an object");
    }
    GenerationRequest req;
    req.prefix = required<std::string>(j, "prefix");
    req.num_candidates = positive_count(j, "num_candidates", kDefaultNumCandidates);
    req.max_new_tokens = positive_count(j, "max_new_tokens", kDefaultMaxNewTokens);
    return req;
}

json response_to_json(const GenerationResult& result) {
    json flags = json::array();
    for (const bool b : result.truncated) {
        flags.push_back(b);
    }
    return {{"candidates", result.candidates}, {"truncated_flags", std::move(flags)}};
}

GenerationResult response_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("response must be an object");
    }
    if (const auto it = j.find("error"); it != j.end()) {
        throw BackendError("backend error: " + (it->is_string() ? it->get<std::string>() : it->dump()));
    }
    GenerationResult r;
    r.candidates = required<std::vector<std::string>>(j, "candidates");
    r.truncated = required<std::vector<bool>>(j, "truncated_flags");
    if (r.truncated.size() != r.candidates.size()) {
        throw std::invalid_argument("truncated_flags and candidates differ in length");
    }
    return r;
}

void serve(Backend& backend, std::istream& in, std::ostream& out) {
    out << descriptor_to_json(backend.descriptor()).dump() << '\n' << std::flush;
    std::string line;
    while (std::getline(in, line)) {
        if (text::normalize_whitespace(line).empty()) {
            continue;
        }
        json response;
        try {
            const GenerationRequest req = request_from_json(json::parse(line));
            response = response_to_json(backend.generate(req));
        } catch (const std::exception& e) {
            response = {{"error", e.what()}};
        }
        out << response.dump() << '\n' << std::flush;
    }
}

} // namespace costar::protocol
