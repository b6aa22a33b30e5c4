#include "maxattn/cli/report.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace maxattn::cli {

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

void write_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.command, r.function,
                       r.d, r.n, num(r.D), r.p_or_nx, r.g, num(r.temperature),
                       r.epsilon_target ? num(*r.epsilon_target) : "", num(r.p), r.samples,
                       r.seed, num(r.sup_err), num(r.lp_err), r.out_of_cover,
                       num(r.runtime_ms));
  }
}

void write_json(const std::vector<ReportRow>& rows, std::ostream& out) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["command"] = r.command;
    row["function"] = r.function;
    row["d"] = r.d;
    row["n"] = r.n;
    row["D"] = r.D;
    row["P_or_Nx"] = r.p_or_nx;
    row["G"] = r.g;
    row["temperature"] = r.temperature;
    row["epsilon_target"] = r.epsilon_target ? nlohmann::ordered_json(*r.epsilon_target) : nullptr;
    row["p"] = r.p;
    row["samples"] = r.samples;
    row["seed"] = r.seed;
    row["sup_err"] = r.sup_err;
    row["lp_err"] = r.lp_err;
    row["lp_stderr"] = r.lp_stderr;
    row["out_of_cover"] = r.out_of_cover;
    row["runtime_ms"] = r.runtime_ms;
    doc.push_back(std::move(row));
  }
  out << doc.dump(2) << '\n';
}

void write_verify_csv(const std::vector<PropertyResult>& results, std::ostream& out) {
  out << "property,status,worst,tolerance,runtime_ms\n";
  for (const auto& r : results) {
    out << fmt::format("{},{},{},{},{}\n", r.name, r.passed ? "PASS" : "FAIL", num(r.worst),
                       num(r.tolerance), num(r.runtime_ms));
  }
}

void write_verify_json(const std::vector<PropertyResult>& results, std::ostream& out) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    doc.push_back({{"property", r.name},
                   {"status", r.passed ? "PASS" : "FAIL"},
                   {"worst", r.worst},
                   {"tolerance", r.tolerance},
                   {"runtime_ms", r.runtime_ms}});
  }
  out << doc.dump(2) << '\n';
}

std::filesystem::path emit_plot_script(const std::filesystem::path& report_path, PlotKind kind,
                                       const std::optional<std::filesystem::path>& curve_csv) {
  if (!std::filesystem::exists(report_path)) {
    throw std::invalid_argument("emit_plot_script: report '" + report_path.string() +
                                "' does not exist");
  }
  if (kind != PlotKind::error_vs_size && !curve_csv) {
    throw std::invalid_argument("emit_plot_script: this plot needs a curve file");
  }
  std::filesystem::path script = report_path;
  script.replace_extension(".plot.py");
  std::ofstream out(script);
  if (!out) throw std::invalid_argument("cannot write " + script.string());

  const std::string report = report_path.filename().string();
  out << "#!/usr/bin/env python3\n"
         "import os\n"
         "import matplotlib\n"
         "matplotlib.use(\"Agg\")\n"
         "import matplotlib.pyplot as plt\n"
         "import pandas as pd\n\n"
         "HERE = os.path.dirname(os.path.abspath(__file__))\n";
  if (report_path.extension() == ".json") {
    out << fmt::format("report = pd.read_json(os.path.join(HERE, \"{}\"))\n", report);
  } else {
    out << fmt::format("report = pd.read_csv(os.path.join(HERE, \"{}\"))\n", report);
  }

  switch (kind) {
    case PlotKind::error_vs_size:
      out << "fig, ax = plt.subplots()\n"
             "for temp, group in report.groupby(\"temperature\"):\n"
             "    group = group.sort_values(\"P_or_Nx\")\n"
             "    ax.loglog(group[\"P_or_Nx\"], group[\"sup_err\"], \"o-\", label=f\"sup, R={temp:.3g}\")\n"
             "    ax.loglog(group[\"P_or_Nx\"], group[\"lp_err\"], \"s--\", label=f\"L_p, R={temp:.3g}\")\n"
             "eps = report[\"epsilon_target\"].dropna()\n"
             "if len(eps):\n"
             "    ax.axhline(eps.iloc[0], color=\"k\", lw=0.8, label=\"epsilon\")\n"
             "ax.set_xlabel(\"points per axis / centers\")\n"
             "ax.set_ylabel(\"error\")\n"
             "ax.legend()\n";
      break;
    case PlotKind::curve_overlay:
      out << fmt::format("curve = pd.read_csv(os.path.join(HERE, \"{}\"))\n",
                         curve_csv->filename().string())
          << "fig, ax = plt.subplots()\n"
             "ax.plot(curve[\"x\"], curve[\"f\"], label=\"target\")\n"
             "ax.plot(curve[\"x\"], curve[\"approx\"], \"--\", label=\"attention\")\n"
             "ax.set_title(f\"sup error {report['sup_err'].iloc[0]:.3g}\")\n"
             "ax.set_xlabel(\"z\")\n"
             "ax.legend()\n";
      break;
    case PlotKind::partition:
      out << fmt::format("curve = pd.read_csv(os.path.join(HERE, \"{}\"))\n",
                         curve_csv->filename().string())
          << "fig, (top, bottom) = plt.subplots(2, 1, sharex=True)\n"
             "top.plot(curve[\"x\"], curve[\"envelope\"], label=\"max-affine envelope\")\n"
             "edges = curve[\"x\"][curve[\"cell\"].diff().fillna(0) != 0]\n"
             "for x in edges:\n"
             "    top.axvline(x, color=\"grey\", lw=0.6)\n"
             "    bottom.axvline(x, color=\"grey\", lw=0.6)\n"
             "top.legend()\n"
             "bottom.step(curve[\"x\"], curve[\"level\"], where=\"mid\", label=\"cell value\")\n"
             "bottom.plot(curve[\"x\"], curve[\"approx\"], \"--\", label=\"attention\")\n"
             "bottom.set_xlabel(\"x\")\n"
             "bottom.legend()\n";
      break;
  }
  out << "fig.tight_layout()\n"
         "fig.savefig(os.path.splitext(os.path.abspath(__file__))[0] + \".png\", dpi=150)\n";
  return script;
}

}  // namespace maxattn::cli
