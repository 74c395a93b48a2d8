#pragma once

// Macro-architecture assembly and analytic cost accounting.
//
// Conventions (multiplies only; additions and pooling are free):
//   * sep_conv kxk: depthwise k*k*Cin*Hout*Wout + pointwise Cin*Cout*Hout*Wout,
//     params k*k*Cin + Cin*Cout.
//   * 1x1 conv: Cin*Cout*Hout*Wout, params Cin*Cout.
//   * factorized reduction (stride 2): two 1x1 stride-2 paths producing Cout/2
//     and Cout - Cout/2 channels; same totals as one 1x1 conv at the output
//     resolution.
//   * every conv optionally adds 2*Cout batch-norm parameters.
// Cells calibrate both inputs to the cell width with 1x1 convs (factorized
// reduction when c_{k-2} has twice the resolution of c_{k-1}), and project
// the depth concatenation back to the cell width with a final 1x1 conv.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "paretonas/genome.hpp"

namespace paretonas {

enum class MacroTemplate { cifar, imagenet };

std::string_view to_string(MacroTemplate t);
/// Accepts "cifar", "cifar10" and "imagenet".
MacroTemplate parse_template(std::string_view name);

struct MacroConfig {
  MacroTemplate template_kind = MacroTemplate::cifar;
  int repeats = 2;        // normal cells per stack
  int filters = 32;       // width of the first normal stack
  int resolution = 32;
  int classes = 10;
  bool count_batchnorm = true;

  static MacroConfig cifar(int repeats = 2, int filters = 32);
  static MacroConfig imagenet(int repeats = 4, int filters = 44);
};

inline constexpr int kImagenetStemChannels = 32;

struct LayerShape {
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::int64_t channels = 0;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

struct CostReport {
  std::int64_t mult_adds = 0;
  std::int64_t flops = 0;
  std::int64_t params = 0;

  CostReport& operator+=(const CostReport& o) {
    mult_adds += o.mult_adds;
    flops += o.flops;
    params += o.params;
    return *this;
  }
  friend bool operator==(const CostReport&, const CostReport&) = default;
};

/// Cost with flops derived as 2 * mult_adds.
CostReport make_cost(std::int64_t mult_adds, std::int64_t params);

class NetworkError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CellInstance {
  bool reduction = false;
  int width = 0;
  LayerShape prev;       // c_{k-1}
  LayerShape prev_prev;  // c_{k-2}
  LayerShape output;
};

struct NetworkPlan {
  LayerShape image;
  /// Stem conv output (imagenet only).
  std::optional<LayerShape> stem;
  std::vector<CellInstance> cells;
  int final_channels = 0;
  int classes = 0;
};

NetworkPlan build_network(const Genome& g, const MacroConfig& m);

struct OpCost {
  std::int64_t mult_adds = 0;
  std::int64_t params = 0;
  LayerShape output;
};

/// Cost of one searchable operation. Identity and pooling are free and keep
/// the input channel count.
OpCost op_cost(OperationKind op, const LayerShape& in, std::int64_t out_channels, int stride,
               bool count_batchnorm = true);

OpCost conv1x1_cost(const LayerShape& in, std::int64_t out_channels, bool count_batchnorm = true);
OpCost factorized_reduction_cost(const LayerShape& in, std::int64_t out_channels,
                                 bool count_batchnorm = true);

std::pair<CostReport, LayerShape> cell_cost(const CellGenome& c, const LayerShape& prev,
                                            const LayerShape& prev_prev, int width,
                                            bool is_reduction, bool count_batchnorm = true);

CostReport network_cost(const Genome& g, const MacroConfig& m);

/// Inferences per second proxy: 2e9 / flops.
double speed(const CostReport& cost);

}  // namespace paretonas
