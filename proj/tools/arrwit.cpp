#include <arrwit/cli.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Witness-variable array transformation for bounded model checking"};
  app.require_subcommand(1);
  CLI::App* transform = app.add_subcommand("transform", "Rewrite a program into an array-free, loop-free one");

  arrwit::CliInvocation inv;
  std::string output, report, style = "cbmc", domain;
  arrwit::Value size = 0;
  transform->add_option("input", inv.input_path, "Input program")->required();
  transform->add_option("-o,--output", output, "Write the emitted C program here");
  transform->add_option("--nd-style", style, "Nondeterminism conventions")
      ->check(CLI::IsMember({"cbmc", "svcomp", "stub"}));
  transform->add_option("--report", report, "Write the JSON analysis report here");
  transform->add_flag("--check-precision", inv.check_precision, "Classify every assertion");
  transform->add_flag("--oracle", inv.oracle, "Compare both programs by exhaustive enumeration");
  transform->add_option("--array-size", size, "Array size used by the oracle (1..8)");
  transform->add_option("--value-domain", domain, "Values of input() and nd() for the oracle, as lo:hi");
  transform->add_option("--max-steps", inv.max_steps, "Oracle exploration budget");
  transform->add_flag("--bmc", inv.bmc, "Run the checker named by BMC_BIN on the emitted program");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : arrwit::kExitError;
  }

  if (!output.empty()) inv.output_path = output;
  if (!report.empty()) inv.report_path = report;
  if (transform->count("--array-size")) inv.array_size = size;
  arrwit::parse_style(style, inv.nd_style);
  if (!domain.empty()) {
    inv.value_domain = arrwit::parse_value_domain(domain);
    if (!inv.value_domain) {
      std::cerr << "arrwit: --value-domain expects lo:hi with lo <= hi\n";
      return arrwit::kExitError;
    }
  }
  return arrwit::run(inv, std::cout, std::cerr);
}
