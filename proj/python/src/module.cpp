// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "phyfea/config.hpp"
#include "phyfea/error.hpp"
#include "phyfea/loss.hpp"
#include "phyfea/version.hpp"

namespace py = pybind11;
using namespace phyfea;

namespace {

// Reads a C-contiguous float32 buffer as (C,H,W). A flat buffer needs `shape`.
Tensor<float> tensor_from_buffer(const py::buffer& buffer, const std::optional<std::vector<std::size_t>>& shape) {
  const py::buffer_info info = buffer.request();
  if (info.format != py::format_descriptor<float>::format() || info.itemsize != 4) {
    throw py::type_error("scores must be float32, got format '" + info.format + "'");
  }
  Dims dims;
  if (shape) {
    dims = *shape;
  } else {
    for (auto d : info.shape) dims.push_back(static_cast<std::size_t>(d));
  }
  if (dims.size() != 3) {
    throw py::value_error("scores must have shape (C, H, W), got rank " + std::to_string(dims.size()));
  }
  auto expected = static_cast<py::ssize_t>(sizeof(float));
  for (py::ssize_t axis = info.ndim - 1; axis >= 0; --axis) {
    if (info.strides[axis] != expected) throw py::value_error("scores must be C-contiguous");
    expected *= info.shape[axis];
  }
  if (static_cast<std::size_t>(info.size) != dims_product(dims)) {
    throw py::value_error("payload holds " + std::to_string(info.size) + " floats but shape " +
                          format_dims(dims) + " needs " + std::to_string(dims_product(dims)));
  }
  std::vector<float> data(static_cast<std::size_t>(info.size));
  std::memcpy(data.data(), info.ptr, data.size() * sizeof(float));
  return Tensor<float>(std::move(dims), std::move(data));
}

py::dict penalty_forward_backward(const py::buffer& scores,
                                  std::optional<std::vector<std::size_t>> shape, double alpha,
                                  std::string losses, std::optional<std::size_t> iterations,
                                  double epsilon, double bg_tol, std::string pair_mode,
                                  std::string precision,
                                  std::optional<std::size_t> workers, bool with_grad) {
  const Tensor<float> input = tensor_from_buffer(scores, shape);
  EngineConfig cfg;
  cfg.alpha = alpha;
  set_losses(cfg, losses);
  cfg.iterations = iterations;
  cfg.epsilon = epsilon;
  cfg.bg_tol = bg_tol;
  cfg.pair_mode = parse_pair_mode(pair_mode);
  cfg.precision = parse_precision(precision);
  cfg.workers = workers;
  cfg.with_grad = with_grad;
  cfg.validate();

  double l_opening = 0, l_dilation = 0, penalty = 0;
  std::optional<Tensor<float>> grad;
  {
    py::gil_scoped_release release;
    auto take = [&](const auto& report) {
      l_opening = report.l_opening;
      l_dilation = report.l_dilation;
      penalty = report.penalty;
      if (report.grad) grad = tensor_cast<float>(*report.grad);
    };
    if (cfg.precision == Precision::single) {
      take(compute_penalty(input, cfg));
    } else {
      take(compute_penalty(tensor_cast<double>(input), cfg));
    }
  }

  py::dict out;
  out["l_opening"] = l_opening;
  out["l_dilation"] = l_dilation;
  out["penalty"] = penalty;
  if (grad) {
    std::vector<py::ssize_t> dims(grad->dims().begin(), grad->dims().end());
    py::array_t<float> g(dims);
    std::memcpy(g.mutable_data(), grad->data().data(), grad->size() * sizeof(float));
    out["grad"] = std::move(g);
  } else {
    out["grad"] = py::none();
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Physical-feasibility penalty engine";

  static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const ContractError& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.def("penalty_forward_backward", &penalty_forward_backward, py::arg("scores"), py::kw_only(),
        py::arg("shape") = py::none(), py::arg("alpha") = 1e-5, py::arg("losses") = "both",
        py::arg("iterations") = py::none(), py::arg("epsilon") = 1e-8, py::arg("bg_tol") = 1e-6,
        py::arg("pair_mode") = "all",        py::arg("precision") = "double", py::arg("workers") = py::none(),
        py::arg("with_grad") = true,
        R"doc(Penalty alpha * |l_opening - l_dilation| of a float32 (C, H, W) score buffer.

Returns a dict with l_opening, l_dilation, penalty and grad (float32, same
shape as scores, or None when with_grad is False). A flat buffer needs
`shape`. Computation runs in double precision unless precision="single".)doc");
  m.def("version_info", &version_info);
}
