#include "paretonas/network.hpp"

#include <array>

namespace paretonas {

namespace {

std::int64_t halve(std::int64_t v) { return (v + 1) / 2; }

std::int64_t batchnorm_params(std::int64_t channels, bool enabled) {
  return enabled ? 2 * channels : 0;
}

void require_positive(const LayerShape& s, const char* what) {
  if (s.height <= 0 || s.width <= 0 || s.channels <= 0) {
    throw NetworkError(std::string(what) + ": zero-size shape");
  }
}

}  // namespace

std::string_view to_string(MacroTemplate t) {
  return t == MacroTemplate::cifar ? "cifar10" : "imagenet";
}

MacroTemplate parse_template(std::string_view name) {
  if (name == "cifar" || name == "cifar10") return MacroTemplate::cifar;
  if (name == "imagenet") return MacroTemplate::imagenet;
  throw NetworkError("unknown macro template \"" + std::string(name) + "\"");
}

MacroConfig MacroConfig::cifar(int repeats, int filters) {
  return MacroConfig{MacroTemplate::cifar, repeats, filters, 32, 10, true};
}

MacroConfig MacroConfig::imagenet(int repeats, int filters) {
  return MacroConfig{MacroTemplate::imagenet, repeats, filters, 224, 1000, true};
}

CostReport make_cost(std::int64_t mult_adds, std::int64_t params) {
  return CostReport{mult_adds, 2 * mult_adds, params};
}

OpCost conv1x1_cost(const LayerShape& in, std::int64_t out_channels, bool count_batchnorm) {
  require_positive(in, "conv1x1");
  const LayerShape out{in.height, in.width, out_channels};
  return {out.height * out.width * in.channels * out_channels,
          in.channels * out_channels + batchnorm_params(out_channels, count_batchnorm), out};
}

OpCost factorized_reduction_cost(const LayerShape& in, std::int64_t out_channels,
                                 bool count_batchnorm) {
  require_positive(in, "factorized reduction");
  const LayerShape out{halve(in.height), halve(in.width), out_channels};
  // Two stride-2 1x1 paths of out/2 and out - out/2 channels.
  return {out.height * out.width * in.channels * out_channels,
          in.channels * out_channels + batchnorm_params(out_channels, count_batchnorm), out};
}

OpCost op_cost(OperationKind op, const LayerShape& in, std::int64_t out_channels, int stride,
               bool count_batchnorm) {
  require_positive(in, "op_cost");
  if (stride != 1 && stride != 2) throw NetworkError("op_cost: stride must be 1 or 2");
  LayerShape out = in;
  if (stride == 2) {
    out.height = halve(in.height);
    out.width = halve(in.width);
  }
  const int k = kernel_size(op);
  if (k == 0) return {0, 0, out};

  if (out_channels <= 0) throw NetworkError("op_cost: zero-size shape");
  out.channels = out_channels;
  const std::int64_t positions = out.height * out.width;
  const std::int64_t depthwise = static_cast<std::int64_t>(k) * k * in.channels;
  const std::int64_t pointwise = in.channels * out_channels;
  return {(depthwise + pointwise) * positions,
          depthwise + pointwise + batchnorm_params(out_channels, count_batchnorm), out};
}

std::pair<CostReport, LayerShape> cell_cost(const CellGenome& c, const LayerShape& prev,
                                            const LayerShape& prev_prev, int width,
                                            bool is_reduction, bool count_batchnorm) {
  require_positive(prev, "cell input c_{k-1}");
  require_positive(prev_prev, "cell input c_{k-2}");
  if (width <= 0) throw NetworkError("cell width must be positive");

  std::int64_t mult_adds = 0;
  std::int64_t params = 0;
  auto add = [&](const OpCost& oc) {
    mult_adds += oc.mult_adds;
    params += oc.params;
    return oc.output;
  };

  // Calibrate both inputs to `width` channels at the resolution of c_{k-1}.
  std::vector<LayerShape> hidden;
  hidden.reserve(c.blocks.size() + 2);
  if (prev_prev.height == prev.height && prev_prev.width == prev.width) {
    hidden.push_back(add(conv1x1_cost(prev_prev, width, count_batchnorm)));
  } else if (halve(prev_prev.height) == prev.height && halve(prev_prev.width) == prev.width) {
    hidden.push_back(add(factorized_reduction_cost(prev_prev, width, count_batchnorm)));
  } else {
    throw NetworkError("cell inputs have incompatible spatial sizes");
  }
  hidden.push_back(add(conv1x1_cost(prev, width, count_batchnorm)));

  const LayerShape output{is_reduction ? halve(prev.height) : prev.height,
                          is_reduction ? halve(prev.width) : prev.width, width};

  for (const Block& b : c.blocks) {
    for (auto [src, op] : {std::pair{b.input1, b.op1}, std::pair{b.input2, b.op2}}) {
      const LayerShape& in = hidden.at(static_cast<std::size_t>(src));
      const int stride = is_reduction && src < 2 ? 2 : 1;
      if (op == OperationKind::identity && stride == 2) {
        add(factorized_reduction_cost(in, width, count_batchnorm));
      } else {
        add(op_cost(op, in, width, stride, count_batchnorm));
      }
    }
    hidden.push_back(output);
  }

  const std::vector<int> sources = concat_sources(c);
  for (int src : sources) {
    if (is_reduction && src < 2) {
      add(factorized_reduction_cost(hidden[static_cast<std::size_t>(src)], width, count_batchnorm));
    }
  }
  const LayerShape concatenated{output.height, output.width,
                                static_cast<std::int64_t>(sources.size()) * width};
  add(conv1x1_cost(concatenated, width, count_batchnorm));

  return {make_cost(mult_adds, params), output};
}

NetworkPlan build_network(const Genome& g, const MacroConfig& m) {
  if (m.repeats < 1 || m.filters < 1) throw NetworkError("macro: N and F must be >= 1");
  if (m.resolution < 1 || m.classes < 1) throw NetworkError("macro: resolution and classes must be >= 1");
  if (g.block_count() == 0) throw NetworkError("genome has no blocks");

  const bool imagenet = m.template_kind == MacroTemplate::imagenet;
  const int halvings = imagenet ? 5 : 2;
  if (static_cast<std::int64_t>(m.resolution) < (std::int64_t{1} << halvings)) {
    throw NetworkError("resolution " + std::to_string(m.resolution) + " too small for " +
                       std::to_string(halvings) + " spatial reductions");
  }

  NetworkPlan plan;
  plan.image = {m.resolution, m.resolution, 3};
  plan.classes = m.classes;
  LayerShape prev = plan.image;
  LayerShape prev_prev = plan.image;

  auto push_cell = [&](bool reduction, int width) {
    CellInstance cell{reduction, width, prev, prev_prev, {}};
    cell.output = {reduction ? halve(prev.height) : prev.height,
                   reduction ? halve(prev.width) : prev.width, width};
    prev_prev = prev;
    prev = cell.output;
    plan.cells.push_back(cell);
  };

  if (imagenet) {
    plan.stem = LayerShape{halve(m.resolution), halve(m.resolution), kImagenetStemChannels};
    prev = prev_prev = *plan.stem;
    push_cell(true, std::max(1, m.filters / 4));
    push_cell(true, std::max(1, m.filters / 2));
  }
  int width = m.filters;
  for (int stack = 0; stack < 3; ++stack) {
    if (stack > 0) {
      width *= 2;
      push_cell(true, width);
    }
    for (int i = 0; i < m.repeats; ++i) push_cell(false, width);
  }
  plan.final_channels = width;
  return plan;
}

CostReport network_cost(const Genome& g, const MacroConfig& m) {
  const NetworkPlan plan = build_network(g, m);
  CostReport total;
  if (plan.stem) {
    const std::int64_t in_ch = plan.image.channels;
    const std::int64_t out_ch = plan.stem->channels;
    const std::int64_t weights = 9 * in_ch * out_ch;
    total += make_cost(weights * plan.stem->height * plan.stem->width,
                       weights + batchnorm_params(out_ch, m.count_batchnorm));
  }
  for (const CellInstance& cell : plan.cells) {
    const CellGenome& genes = cell.reduction ? g.reduction : g.normal;
    total += cell_cost(genes, cell.prev, cell.prev_prev, cell.width, cell.reduction,
                       m.count_batchnorm).first;
  }
  const std::int64_t linear = static_cast<std::int64_t>(plan.final_channels) * plan.classes;
  total += make_cost(linear, linear);
  return total;
}

double speed(const CostReport& cost) {
  if (cost.flops <= 0) throw NetworkError("speed: flops must be positive");
  return 2.0e9 / static_cast<double>(cost.flops);
}

}  // namespace paretonas
