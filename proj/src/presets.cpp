#include "pushpull/config.hpp"

namespace pushpull {

namespace {

nlohmann::json mnist_preset(const std::string& name, const std::string& positive,
                            const std::string& negative) {
  return nlohmann::json{
      {"problem",
       {{"preset", name},
        {"kind", "logistic"},
        {"dataset", "mnist_train.csv"},
        {"schema",
         {{"label_column", "label"},
          {"positive_label", positive},
          {"negative_label", negative},
          {"feature_columns", nlohmann::json::array()},
          {"normalize", true}}},
        {"train_rows", 2000},
        {"test_rows", 1000},
        {"lambda", 0.001}}},
      {"network", {{"n", 10}, {"horizon", 20000}, {"extra_edge_prob", 0.3}, {"seed", 7}}},
      {"solver",
       {{"alpha", 0.01},
        {"beta", 0.3},
        {"gamma", 0.01},
        {"max_iters", 20000},
        {"stop_tolerance", 1e-3},
        {"log_stride", 10}}},
      {"analysis",
       {{"certificate", false}, {"verify_propositions", false}, {"analytic_sigma", false}}},
      {"output_dir", "out"}};
}

}  // namespace

nlohmann::json preset_config(const std::string& name) {
  if (name == "sensor-fusion") {
    return nlohmann::json{
        {"problem",
         {{"preset", "sensor-fusion"},
          {"kind", "ridge"},
          {"p", 20},
          {"s", 1},
          {"noise_sigma", 1.0},
          {"seed", 11},
          {"lambda", 0.01}}},
        {"network", {{"n", 20}, {"horizon", 4000}, {"extra_edge_prob", 0.3}, {"seed", 3}}},
        {"solver",
         {{"alpha", 0.25},
          {"beta", 0.7},
          {"gamma", 0.05},
          {"max_iters", 4000},
          {"stop_tolerance", 1e-10},
          {"log_stride", 1}}},
        {"analysis",
         {{"certificate", false},
          {"verify_propositions", false},
          {"analytic_sigma", false}}},
        {"output_dir", "out"}};
  }
  if (name == "diabetes") {
    return nlohmann::json{
        {"problem",
         {{"preset", "diabetes"},
          {"kind", "logistic"},
          {"dataset", "diabetes.csv"},
          {"schema",
           {{"label_column", "Outcome"},
            {"positive_label", "1"},
            {"negative_label", ""},
            {"feature_columns", nlohmann::json::array()},
            {"normalize", true}}},
          {"train_rows", 700},
          {"test_rows", 68},
          {"lambda", 0.001}}},
        {"network", {{"n", 7}, {"horizon", 30000}, {"extra_edge_prob", 0.3}, {"seed", 5}}},
        {"solver",
         {{"alpha", 0.5},
          {"beta", 0.7},
          {"gamma", 0.1},
          {"max_iters", 30000},
          {"stop_tolerance", 1e-7},
          {"log_stride", 10}}},
        {"analysis",
         {{"certificate", false},
          {"verify_propositions", false},
          {"analytic_sigma", false}}},
        {"output_dir", "out"}};
  }
  if (name == "mnist-binary" || name == "mnist-binary-12")
    return mnist_preset("mnist-binary-12", "1", "2");
  if (name == "mnist-binary-35") return mnist_preset("mnist-binary-35", "3", "5");
  throw ConfigError("config: unknown preset \"" + name + "\"");
}

std::vector<std::string> preset_names() {
  return {"sensor-fusion", "diabetes", "mnist-binary-12", "mnist-binary-35"};
}

}  // namespace pushpull
