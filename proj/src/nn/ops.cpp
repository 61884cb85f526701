#include "nn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace weakseg::nn {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;

struct ConvGeometry {
  int channels, height, width, kernel_h, kernel_w, out_h, out_w;
  ConvOptions opt;

  bool is_pointwise() const {
    return kernel_h == 1 && kernel_w == 1 && opt.stride == 1 && opt.padding == 0;
  }
  long rows() const { return static_cast<long>(channels) * kernel_h * kernel_w; }
  long cols() const { return static_cast<long>(out_h) * out_w; }
};

void im2col(const double* x, const ConvGeometry& g, double* col) {
  const int s = g.opt.stride, p = g.opt.padding, d = g.opt.dilation;
  for (int c = 0; c < g.channels; ++c) {
    const double* xc = x + static_cast<std::size_t>(c) * g.height * g.width;
    for (int i = 0; i < g.kernel_h; ++i) {
      for (int j = 0; j < g.kernel_w; ++j) {
        double* row = col + ((static_cast<std::size_t>(c) * g.kernel_h + i) * g.kernel_w + j) * g.cols();
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * s - p + i * d;
          double* out = row + static_cast<std::size_t>(oy) * g.out_w;
          if (iy < 0 || iy >= g.height) {
            std::fill(out, out + g.out_w, 0.0);
            continue;
          }
          const double* xr = xc + static_cast<std::size_t>(iy) * g.width;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * s - p + j * d;
            out[ox] = (ix >= 0 && ix < g.width) ? xr[ix] : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const double* col, const ConvGeometry& g, double* x) {
  const int s = g.opt.stride, p = g.opt.padding, d = g.opt.dilation;
  for (int c = 0; c < g.channels; ++c) {
    double* xc = x + static_cast<std::size_t>(c) * g.height * g.width;
    for (int i = 0; i < g.kernel_h; ++i) {
      for (int j = 0; j < g.kernel_w; ++j) {
        const double* row =
            col + ((static_cast<std::size_t>(c) * g.kernel_h + i) * g.kernel_w + j) * g.cols();
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * s - p + i * d;
          if (iy < 0 || iy >= g.height) continue;
          double* xr = xc + static_cast<std::size_t>(iy) * g.width;
          const double* in = row + static_cast<std::size_t>(oy) * g.out_w;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * s - p + j * d;
            if (ix >= 0 && ix < g.width) xr[ix] += in[ox];
          }
        }
      }
    }
  }
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw invalid_argument(std::string(op) + ": shape mismatch " + a.shape().str() + " vs " +
                           b.shape().str());
  }
}

struct ResizeAxis {
  std::vector<int> lo, hi;
  std::vector<double> w_hi;
};

ResizeAxis resize_axis(int in, int out) {
  ResizeAxis axis;
  axis.lo.resize(out);
  axis.hi.resize(out);
  axis.w_hi.resize(out);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    double src = (o + 0.5) * scale - 0.5;
    if (src < 0.0) src = 0.0;
    int lo = static_cast<int>(src);
    if (lo > in - 1) lo = in - 1;
    axis.lo[o] = lo;
    axis.hi[o] = lo < in - 1 ? lo + 1 : lo;
    axis.w_hi[o] = src - lo;
  }
  return axis;
}

Tensor resize_value(const Tensor& x, int out_h, int out_w, const ResizeAxis& ay,
                    const ResizeAxis& ax) {
  const Shape in = x.shape();
  Tensor y({in.n, in.c, out_h, out_w});
  for (int n = 0; n < in.n; ++n) {
    for (int c = 0; c < in.c; ++c) {
      const double* src = x.plane(n, c);
      double* dst = y.plane(n, c);
      for (int oy = 0; oy < out_h; ++oy) {
        const double* r0 = src + static_cast<std::size_t>(ay.lo[oy]) * in.w;
        const double* r1 = src + static_cast<std::size_t>(ay.hi[oy]) * in.w;
        const double wy = ay.w_hi[oy];
        for (int ox = 0; ox < out_w; ++ox) {
          const double wx = ax.w_hi[ox];
          const double top = (1.0 - wx) * r0[ax.lo[ox]] + wx * r0[ax.hi[ox]];
          const double bot = (1.0 - wx) * r1[ax.lo[ox]] + wx * r1[ax.hi[ox]];
          dst[static_cast<std::size_t>(oy) * out_w + ox] = (1.0 - wy) * top + wy * bot;
        }
      }
    }
  }
  return y;
}

}  // namespace

int conv_output_extent(int input, int kernel, const ConvOptions& o) {
  return (input + 2 * o.padding - o.dilation * (kernel - 1) - 1) / o.stride + 1;
}

Var conv2d(const Var& x, const Var& weight, const Var& bias, const ConvOptions& options) {
  const Shape xs = x.shape();
  const Shape ws = weight.shape();
  if (ws.c != xs.c) {
    throw invalid_argument("conv2d: input has " + std::to_string(xs.c) + " channels, weight expects " +
                           std::to_string(ws.c));
  }
  if (options.stride < 1 || options.dilation < 1 || options.padding < 0) {
    throw invalid_argument("conv2d: invalid stride/dilation/padding");
  }
  ConvGeometry g{xs.c, xs.h, xs.w, ws.h, ws.w, conv_output_extent(xs.h, ws.h, options),
                 conv_output_extent(xs.w, ws.w, options), options};
  if (g.out_h <= 0 || g.out_w <= 0) {
    throw invalid_argument("conv2d: input " + xs.str() + " too small for kernel");
  }
  const int out_c = ws.n;
  Tensor y({xs.n, out_c, g.out_h, g.out_w});
  ConstMatMap wmat(weight.value().data(), out_c, g.rows());
  Storage col_buffer(g.is_pointwise() ? 0 : static_cast<std::size_t>(g.rows() * g.cols()));
  for (int n = 0; n < xs.n; ++n) {
    const double* col = x.value().plane(n, 0);
    if (!g.is_pointwise()) {
      im2col(x.value().plane(n, 0), g, col_buffer.data());
      col = col_buffer.data();
    }
    MatMap out(y.plane(n, 0), out_c, g.cols());
    out.noalias() = wmat * ConstMatMap(col, g.rows(), g.cols());
    if (bias.defined()) {
      for (int o = 0; o < out_c; ++o) out.row(o).array() += bias.value().values()[o];
    }
  }

  std::vector<Var> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return make_result(std::move(y), std::move(inputs), [g, out_c](Node& self) {
    Node& xn = *self.inputs[0];
    Node& wn = *self.inputs[1];
    Node* bn = self.inputs.size() > 2 ? self.inputs[2].get() : nullptr;
    const Shape xs = xn.value.shape();
    ConstMatMap wmat(wn.value.data(), out_c, g.rows());
    Storage col_buffer(g.is_pointwise() ? 0 : static_cast<std::size_t>(g.rows() * g.cols()));
    Storage dcol(xn.requires_grad && !g.is_pointwise()
                                 ? static_cast<std::size_t>(g.rows() * g.cols())
                                 : 0);
    for (int n = 0; n < xs.n; ++n) {
      ConstMatMap dy(self.grad.plane(n, 0), out_c, g.cols());
      if (wn.requires_grad) {
        const double* col = xn.value.plane(n, 0);
        if (!g.is_pointwise()) {
          im2col(xn.value.plane(n, 0), g, col_buffer.data());
          col = col_buffer.data();
        }
        MatMap dw(wn.grad_buffer().data(), out_c, g.rows());
        dw.noalias() += dy * ConstMatMap(col, g.rows(), g.cols()).transpose();
      }
      if (bn && bn->requires_grad) {
        double* db = bn->grad_buffer().data();
        for (int o = 0; o < out_c; ++o) db[o] += dy.row(o).sum();
      }
      if (xn.requires_grad) {
        if (g.is_pointwise()) {
          MatMap dx(xn.grad_buffer().plane(n, 0), g.rows(), g.cols());
          dx.noalias() += wmat.transpose() * dy;
        } else {
          MatMap dc(dcol.data(), g.rows(), g.cols());
          dc.noalias() = wmat.transpose() * dy;
          col2im(dcol.data(), g, xn.grad_buffer().plane(n, 0));
        }
      }
    }
  });
}

Var batch_norm(const Var& x, const Var& gamma, const Var& beta, BatchNormState& state,
               bool training) {
  const Shape s = x.shape();
  if (gamma.shape().c != s.c) throw invalid_argument("batch_norm: channel mismatch");
  const std::size_t count = static_cast<std::size_t>(s.n) * s.plane();
  std::vector<double> mean(s.c), inv_std(s.c);
  if (training) {
    if (count < 2) throw invalid_argument("batch_norm: training needs more than one value per channel");
    double* rm = state.running_mean.mutable_value().data();
    double* rv = state.running_var.mutable_value().data();
    for (int c = 0; c < s.c; ++c) {
      double sum = 0.0;
      for (int n = 0; n < s.n; ++n) {
        const double* p = x.value().plane(n, c);
        for (std::size_t i = 0; i < s.plane(); ++i) sum += p[i];
      }
      const double mu = sum / static_cast<double>(count);
      double sq = 0.0;
      for (int n = 0; n < s.n; ++n) {
        const double* p = x.value().plane(n, c);
        for (std::size_t i = 0; i < s.plane(); ++i) sq += (p[i] - mu) * (p[i] - mu);
      }
      const double var = sq / static_cast<double>(count);
      mean[c] = mu;
      inv_std[c] = 1.0 / std::sqrt(var + state.eps);
      rm[c] = (1.0 - state.momentum) * rm[c] + state.momentum * mu;
      rv[c] = (1.0 - state.momentum) * rv[c] +
              state.momentum * sq / static_cast<double>(count - 1);
    }
  } else {
    for (int c = 0; c < s.c; ++c) {
      mean[c] = state.running_mean.value().values()[c];
      inv_std[c] = 1.0 / std::sqrt(state.running_var.value().values()[c] + state.eps);
    }
  }

  Tensor xhat(s);
  Tensor y(s);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* p = x.value().plane(n, c);
      double* h = xhat.plane(n, c);
      double* o = y.plane(n, c);
      const double g = gamma.value().values()[c];
      const double b = beta.value().values()[c];
      for (std::size_t i = 0; i < s.plane(); ++i) {
        h[i] = (p[i] - mean[c]) * inv_std[c];
        o[i] = g * h[i] + b;
      }
    }
  }

  return make_result(std::move(y), {x, gamma, beta},
                     [xhat = std::move(xhat), inv_std, training, count](Node& self) {
    Node& xn = *self.inputs[0];
    Node& gn = *self.inputs[1];
    Node& bn = *self.inputs[2];
    const Shape s = xhat.shape();
    const double m = static_cast<double>(count);
    for (int c = 0; c < s.c; ++c) {
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (int n = 0; n < s.n; ++n) {
        const double* dy = self.grad.plane(n, c);
        const double* h = xhat.plane(n, c);
        for (std::size_t i = 0; i < s.plane(); ++i) {
          sum_dy += dy[i];
          sum_dy_xhat += dy[i] * h[i];
        }
      }
      if (gn.requires_grad) gn.grad_buffer().values()[c] += sum_dy_xhat;
      if (bn.requires_grad) bn.grad_buffer().values()[c] += sum_dy;
      if (!xn.requires_grad) continue;
      const double g = gn.value.values()[c];
      for (int n = 0; n < s.n; ++n) {
        const double* dy = self.grad.plane(n, c);
        const double* h = xhat.plane(n, c);
        double* dx = xn.grad_buffer().plane(n, c);
        for (std::size_t i = 0; i < s.plane(); ++i) {
          if (training) {
            dx[i] += g * inv_std[c] * (dy[i] - sum_dy / m - h[i] * sum_dy_xhat / m);
          } else {
            dx[i] += g * inv_std[c] * dy[i];
          }
        }
      }
    }
  });
}

Var relu(const Var& x) {
  Tensor y = x.value();
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return make_result(std::move(y), {x}, [](Node& self) {
    Node& xn = *self.inputs[0];
    const auto& xv = xn.value.values();
    auto& dx = xn.grad_buffer().values();
    const auto& dy = self.grad.values();
    for (std::size_t i = 0; i < dy.size(); ++i) {
      if (xv[i] > 0.0) dx[i] += dy[i];
    }
  });
}

Var max_pool2d(const Var& x, int kernel, int stride, int padding) {
  const Shape s = x.shape();
  const ConvOptions o{stride, padding, 1};
  const int oh = conv_output_extent(s.h, kernel, o);
  const int ow = conv_output_extent(s.w, kernel, o);
  if (oh <= 0 || ow <= 0) throw invalid_argument("max_pool2d: input too small");
  Tensor y({s.n, s.c, oh, ow});
  std::vector<std::size_t> argmax(y.numel());
  std::size_t k = 0;
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* p = x.value().plane(n, c);
      const std::size_t base = p - x.value().data();
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox, ++k) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t where = 0;
          for (int i = 0; i < kernel; ++i) {
            const int iy = oy * stride - padding + i;
            if (iy < 0 || iy >= s.h) continue;
            for (int j = 0; j < kernel; ++j) {
              const int ix = ox * stride - padding + j;
              if (ix < 0 || ix >= s.w) continue;
              const double v = p[static_cast<std::size_t>(iy) * s.w + ix];
              if (v > best) {
                best = v;
                where = base + static_cast<std::size_t>(iy) * s.w + ix;
              }
            }
          }
          y.values()[k] = best;
          argmax[k] = where;
        }
      }
    }
  }
  return make_result(std::move(y), {x}, [argmax = std::move(argmax)](Node& self) {
    auto& dx = self.inputs[0]->grad_buffer().values();
    const auto& dy = self.grad.values();
    for (std::size_t i = 0; i < dy.size(); ++i) dx[argmax[i]] += dy[i];
  });
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tensor y = a.value();
  const auto& bv = b.value().values();
  for (std::size_t i = 0; i < bv.size(); ++i) y.values()[i] += bv[i];
  return make_result(std::move(y), {a, b}, [](Node& self) {
    for (auto& in : self.inputs) {
      if (!in->requires_grad) continue;
      auto& d = in->grad_buffer().values();
      const auto& g = self.grad.values();
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
    }
  });
}

Var concat_channels(const std::vector<Var>& parts) {
  if (parts.empty()) throw invalid_argument("concat_channels: no inputs");
  Shape s = parts.front().shape();
  int channels = 0;
  for (const Var& p : parts) {
    const Shape ps = p.shape();
    if (ps.n != s.n || ps.h != s.h || ps.w != s.w) {
      throw invalid_argument("concat_channels: spatial mismatch " + ps.str() + " vs " + s.str());
    }
    channels += ps.c;
  }
  Tensor y({s.n, channels, s.h, s.w});
  for (int n = 0; n < s.n; ++n) {
    int offset = 0;
    for (const Var& p : parts) {
      const int pc = p.shape().c;
      std::copy(p.value().plane(n, 0), p.value().plane(n, 0) + pc * s.plane(), y.plane(n, offset));
      offset += pc;
    }
  }
  return make_result(std::move(y), parts, [](Node& self) {
    const Shape s = self.value.shape();
    int offset = 0;
    for (auto& in : self.inputs) {
      const int pc = in->value.shape().c;
      if (in->requires_grad) {
        Tensor& d = in->grad_buffer();
        for (int n = 0; n < s.n; ++n) {
          const double* g = self.grad.plane(n, offset);
          double* dst = d.plane(n, 0);
          for (std::size_t i = 0; i < pc * s.plane(); ++i) dst[i] += g[i];
        }
      }
      offset += pc;
    }
  });
}

Var slice_channels(const Var& x, int begin, int count) {
  const Shape s = x.shape();
  if (begin < 0 || count <= 0 || begin + count > s.c) throw invalid_argument("slice_channels: range");
  Tensor y({s.n, count, s.h, s.w});
  for (int n = 0; n < s.n; ++n) {
    std::copy(x.value().plane(n, begin), x.value().plane(n, begin) + count * s.plane(), y.plane(n, 0));
  }
  return make_result(std::move(y), {x}, [begin, count](Node& self) {
    Tensor& dx = self.inputs[0]->grad_buffer();
    const Shape s = self.value.shape();
    for (int n = 0; n < s.n; ++n) {
      const double* g = self.grad.plane(n, 0);
      double* dst = dx.plane(n, begin);
      for (std::size_t i = 0; i < count * s.plane(); ++i) dst[i] += g[i];
    }
  });
}

Var mul_channel_broadcast(const Var& x, const Var& gate) {
  const Shape s = x.shape();
  const Shape gs = gate.shape();
  if (gs.c != 1 || gs.n != s.n || gs.h != s.h || gs.w != s.w) {
    throw invalid_argument("mul_channel_broadcast: gate " + gs.str() + " incompatible with " + s.str());
  }
  Tensor y(s);
  for (int n = 0; n < s.n; ++n) {
    const double* m = gate.value().plane(n, 0);
    for (int c = 0; c < s.c; ++c) {
      const double* p = x.value().plane(n, c);
      double* o = y.plane(n, c);
      for (std::size_t i = 0; i < s.plane(); ++i) o[i] = p[i] * m[i];
    }
  }
  return make_result(std::move(y), {x, gate}, [](Node& self) {
    Node& xn = *self.inputs[0];
    Node& gn = *self.inputs[1];
    const Shape s = self.value.shape();
    for (int n = 0; n < s.n; ++n) {
      const double* m = gn.value.plane(n, 0);
      for (int c = 0; c < s.c; ++c) {
        const double* g = self.grad.plane(n, c);
        if (xn.requires_grad) {
          double* dx = xn.grad_buffer().plane(n, c);
          for (std::size_t i = 0; i < s.plane(); ++i) dx[i] += g[i] * m[i];
        }
        if (gn.requires_grad) {
          const double* p = xn.value.plane(n, c);
          double* dm = gn.grad_buffer().plane(n, 0);
          for (std::size_t i = 0; i < s.plane(); ++i) dm[i] += g[i] * p[i];
        }
      }
    }
  });
}

Tensor resize_bilinear(const Tensor& x, int out_h, int out_w) {
  const Shape s = x.shape();
  if (out_h <= 0 || out_w <= 0 || s.h <= 0 || s.w <= 0) throw invalid_argument("resize_bilinear: empty extent");
  if (s.h == out_h && s.w == out_w) return x;
  return resize_value(x, out_h, out_w, resize_axis(s.h, out_h), resize_axis(s.w, out_w));
}

Var resize_bilinear(const Var& x, int out_h, int out_w) {
  const Shape s = x.shape();
  if (out_h <= 0 || out_w <= 0) throw invalid_argument("resize_bilinear: empty extent");
  if (s.h == out_h && s.w == out_w) {
    return make_result(x.value(), {x}, [](Node& self) {
      auto& dx = self.inputs[0]->grad_buffer().values();
      const auto& g = self.grad.values();
      for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
    });
  }
  ResizeAxis ay = resize_axis(s.h, out_h);
  ResizeAxis ax = resize_axis(s.w, out_w);
  Tensor y = resize_value(x.value(), out_h, out_w, ay, ax);
  return make_result(std::move(y), {x}, [ay = std::move(ay), ax = std::move(ax)](Node& self) {
    Tensor& dx = self.inputs[0]->grad_buffer();
    const Shape in = dx.shape();
    const Shape out = self.value.shape();
    for (int n = 0; n < in.n; ++n) {
      for (int c = 0; c < in.c; ++c) {
        const double* g = self.grad.plane(n, c);
        double* d = dx.plane(n, c);
        for (int oy = 0; oy < out.h; ++oy) {
          double* r0 = d + static_cast<std::size_t>(ay.lo[oy]) * in.w;
          double* r1 = d + static_cast<std::size_t>(ay.hi[oy]) * in.w;
          const double wy = ay.w_hi[oy];
          for (int ox = 0; ox < out.w; ++ox) {
            const double v = g[static_cast<std::size_t>(oy) * out.w + ox];
            const double wx = ax.w_hi[ox];
            r0[ax.lo[ox]] += (1.0 - wy) * (1.0 - wx) * v;
            r0[ax.hi[ox]] += (1.0 - wy) * wx * v;
            r1[ax.lo[ox]] += wy * (1.0 - wx) * v;
            r1[ax.hi[ox]] += wy * wx * v;
          }
        }
      }
    }
  });
}

Var adaptive_avg_pool(const Var& x, int bins) {
  const Shape s = x.shape();
  if (bins < 1) throw invalid_argument("adaptive_avg_pool: bins must be positive");
  if (bins > s.h || bins > s.w) {
    throw invalid_argument("pooling bin size " + std::to_string(bins) + " exceeds feature map " +
                           std::to_string(s.h) + "x" + std::to_string(s.w));
  }
  auto start = [](int i, int extent, int b) { return (i * extent) / b; };
  auto stop = [](int i, int extent, int b) { return ((i + 1) * extent + b - 1) / b; };
  Tensor y({s.n, s.c, bins, bins});
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* p = x.value().plane(n, c);
      for (int by = 0; by < bins; ++by) {
        const int y0 = start(by, s.h, bins), y1 = stop(by, s.h, bins);
        for (int bx = 0; bx < bins; ++bx) {
          const int x0 = start(bx, s.w, bins), x1 = stop(bx, s.w, bins);
          double sum = 0.0;
          for (int yy = y0; yy < y1; ++yy) {
            for (int xx = x0; xx < x1; ++xx) sum += p[static_cast<std::size_t>(yy) * s.w + xx];
          }
          y.at(n, c, by, bx) = sum / static_cast<double>((y1 - y0) * (x1 - x0));
        }
      }
    }
  }
  return make_result(std::move(y), {x}, [bins, start, stop](Node& self) {
    Tensor& dx = self.inputs[0]->grad_buffer();
    const Shape s = dx.shape();
    for (int n = 0; n < s.n; ++n) {
      for (int c = 0; c < s.c; ++c) {
        double* d = dx.plane(n, c);
        for (int by = 0; by < bins; ++by) {
          const int y0 = start(by, s.h, bins), y1 = stop(by, s.h, bins);
          for (int bx = 0; bx < bins; ++bx) {
            const int x0 = start(bx, s.w, bins), x1 = stop(bx, s.w, bins);
            const double g = self.grad.at(n, c, by, bx) / static_cast<double>((y1 - y0) * (x1 - x0));
            for (int yy = y0; yy < y1; ++yy) {
              for (int xx = x0; xx < x1; ++xx) d[static_cast<std::size_t>(yy) * s.w + xx] += g;
            }
          }
        }
      }
    }
  });
}

Var softmax_channels(const Var& x) {
  const Shape s = x.shape();
  Tensor y(s);
  for (int n = 0; n < s.n; ++n) {
    for (std::size_t i = 0; i < s.plane(); ++i) {
      double peak = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < s.c; ++c) peak = std::max(peak, x.value().plane(n, c)[i]);
      double total = 0.0;
      for (int c = 0; c < s.c; ++c) {
        const double e = std::exp(x.value().plane(n, c)[i] - peak);
        y.plane(n, c)[i] = e;
        total += e;
      }
      for (int c = 0; c < s.c; ++c) y.plane(n, c)[i] /= total;
    }
  }
  return make_result(std::move(y), {x}, [](Node& self) {
    Tensor& dx = self.inputs[0]->grad_buffer();
    const Shape s = self.value.shape();
    for (int n = 0; n < s.n; ++n) {
      for (std::size_t i = 0; i < s.plane(); ++i) {
        double dot = 0.0;
        for (int c = 0; c < s.c; ++c) dot += self.grad.plane(n, c)[i] * self.value.plane(n, c)[i];
        for (int c = 0; c < s.c; ++c) {
          dx.plane(n, c)[i] += self.value.plane(n, c)[i] * (self.grad.plane(n, c)[i] - dot);
        }
      }
    }
  });
}

Var weighted_sum(const Var& x, const Tensor& weights) {
  if (weights.shape() != x.shape()) throw invalid_argument("weighted_sum: shape mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.numel(); ++i) total += x.value().values()[i] * weights.values()[i];
  return make_result(Tensor({1, 1, 1, 1}, total), {x}, [weights](Node& self) {
    const double g = self.grad.values()[0];
    auto& dx = self.inputs[0]->grad_buffer().values();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g * weights.values()[i];
  });
}

}  // namespace weakseg::nn
