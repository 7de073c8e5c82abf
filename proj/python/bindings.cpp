#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvmdi/channel.hpp"
#include "cvmdi/errors.hpp"
#include "cvmdi/fock.hpp"
#include "cvmdi/gaussian.hpp"
#include "cvmdi/keyrate.hpp"
#include "cvmdi/optimize.hpp"
#include "cvmdi/state.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace cvmdi;

PYBIND11_MODULE(_core, m) {
  m.doc() = "CV-MDI-QKD key-rate engine";

  py::register_exception<Error>(m, "CvmdiError", PyExc_RuntimeError);

  py::enum_<StateFamily>(m, "StateFamily")
      .value("TMSV", StateFamily::Tmsv)
      .value("SPS_TMSV", StateFamily::SpsTmsv)
      .value("TMSC", StateFamily::Tmsc)
      .value("SPS_TMSC", StateFamily::SpsTmsc);
  m.def("family_from_string", &family_from_string, "name"_a);

  py::class_<StateSpec>(m, "StateSpec")
      .def(py::init([](StateFamily family, double V, double d, double Ts) {
             StateSpec s{family, V, d, Ts};
             s.validate();
             return s;
           }),
           "family"_a, "V"_a, "d"_a = 0.0, "Ts"_a = 0.0)
      .def_readonly("family", &StateSpec::family)
      .def_readonly("V", &StateSpec::V)
      .def_readonly("d", &StateSpec::d)
      .def_readonly("Ts", &StateSpec::Ts);

  py::class_<TwoModeCovariance>(m, "TwoModeCovariance")
      .def(py::init([](const Eigen::Matrix4d& m4) {
             TwoModeCovariance c;
             c.m = m4;
             return c;
           }),
           "matrix"_a)
      .def_readonly("m", &TwoModeCovariance::m)
      .def("block_defect", &TwoModeCovariance::block_defect);
  m.def("tmsv_covariance", &tmsv_covariance, "V"_a);

  py::class_<SymplecticPair>(m, "SymplecticPair")
      .def_readonly("nu1", &SymplecticPair::nu1)
      .def_readonly("nu2", &SymplecticPair::nu2);
  m.def("symplectic_eigenvalues", &symplectic_eigenvalues, "cov"_a);
  m.def("symplectic_eigenvalues_generic", &symplectic_eigenvalues_generic,
        "cov"_a);
  m.def("entropy_g", &entropy_g, "nu"_a);
  m.def("von_neumann_entropy", &von_neumann_entropy, "cov"_a);
  m.def("heterodyne_condition", &heterodyne_condition, "cov"_a);
  m.def("mutual_information", &mutual_information, "cov"_a);

  py::class_<FockAmplitudes>(m, "FockAmplitudes")
      .def_readonly("n1_cutoff", &FockAmplitudes::n1_cutoff)
      .def_readonly("n2_cutoff", &FockAmplitudes::n2_cutoff)
      .def_readonly("amp", &FockAmplitudes::amp)
      .def_readonly("norm_sq", &FockAmplitudes::norm_sq);
  m.def("build_tmsc", &build_tmsc, "V"_a, "d"_a, "n1_cutoff"_a, "n2_cutoff"_a);
  m.def(
      "subtract_photon",
      [](const FockAmplitudes& state, double Ts) {
        SubtractionResult r = subtract_photon(state, Ts);
        return py::make_tuple(std::move(r.state), r.p_sps);
      },
      "state"_a, "Ts"_a);
  m.def(
      "moments",
      [](const FockAmplitudes& state) {
        Moments mo = moments(state);
        return py::make_tuple(mo.mean, mo.cov);
      },
      "state"_a);
  m.def(
      "resolve_cutoff",
      [](const StateSpec& spec, double tol, int hard_cap) {
        CutoffPolicy policy;
        policy.hard_cap = hard_cap;
        return resolve_cutoff(spec, tol, policy);
      },
      "spec"_a, "tol"_a = 1e-8, "hard_cap"_a = 4096);
  m.def("seed_cutoff",
        [](double V, double d) { return seed_cutoff(V, d); }, "V"_a, "d"_a);
  m.def("effective_displacement", &effective_displacement, "V"_a, "d"_a);

  py::class_<LinkBudget>(m, "LinkBudget")
      .def(py::init<>())
      .def_readwrite("L_AC_km", &LinkBudget::L_AC_km)
      .def_readwrite("L_BC_km", &LinkBudget::L_BC_km)
      .def_readwrite("w_db_per_km", &LinkBudget::w_db_per_km)
      .def_readwrite("eps_a0", &LinkBudget::eps_a0)
      .def_readwrite("eps_a1", &LinkBudget::eps_a1)
      .def_readwrite("T_B", &LinkBudget::T_B)
      .def_readwrite("eps_B", &LinkBudget::eps_B)
      .def_readwrite("beta", &LinkBudget::beta);

  py::enum_<GainMode>(m, "GainMode")
      .value("LI_OPTIMAL", GainMode::LiOptimal)
      .value("FIXED", GainMode::Fixed)
      .value("NUMERIC", GainMode::Numeric);
  py::class_<GainSpec>(m, "GainSpec")
      .def(py::init([](GainMode mode, double g) {
             return GainSpec{mode, g};
           }),
           "mode"_a = GainMode::LiOptimal, "g"_a = 0.0)
      .def_readonly("mode", &GainSpec::mode)
      .def_readonly("g", &GainSpec::g);

  py::class_<OneWayChannel>(m, "OneWayChannel")
      .def_readonly("T", &OneWayChannel::T)
      .def_readonly("eps_th", &OneWayChannel::eps_th)
      .def_readonly("chi_ch", &OneWayChannel::chi_ch)
      .def_readonly("gain", &OneWayChannel::gain);
  m.def("transmissivity_from_distance", &transmissivity_from_distance,
        "L_km"_a, "w_db_per_km"_a = 0.16);
  m.def("excess_noise_at", &excess_noise_at, "L_km"_a, "a0"_a = 19.09e-5,
        "a1"_a = 6.13e-5);
  m.def("one_way_reduce", &one_way_reduce, "link"_a, "V_bob"_a,
        "gain"_a = GainSpec{});

  py::class_<EvalOptions>(m, "EvalOptions")
      .def(py::init<>())
      .def_readwrite("cutoff_tol", &EvalOptions::cutoff_tol)
      .def_readwrite("cutoff_cap", &EvalOptions::cutoff_cap)
      .def_readwrite("cutoff_search", &EvalOptions::cutoff_search)
      .def_readwrite("use_cache", &EvalOptions::use_cache);

  py::class_<KeyRateBreakdown>(m, "KeyRateBreakdown")
      .def_readonly("p_sps", &KeyRateBreakdown::p_sps)
      .def_readonly("I_AB", &KeyRateBreakdown::I_AB)
      .def_readonly("chi_BE", &KeyRateBreakdown::chi_BE)
      .def_readonly("K", &KeyRateBreakdown::K)
      .def_readonly("nu1", &KeyRateBreakdown::nu1)
      .def_readonly("nu2", &KeyRateBreakdown::nu2)
      .def_readonly("nu3", &KeyRateBreakdown::nu3)
      .def_readonly("cov_source", &KeyRateBreakdown::cov_source)
      .def_readonly("cov_after", &KeyRateBreakdown::cov_after)
      .def_readonly("channel", &KeyRateBreakdown::channel);
  m.def("propagate", &propagate, "cov_source"_a, "channel"_a);
  m.def(
      "holevo_bound",
      [](const TwoModeCovariance& cov) {
        HolevoResult h = holevo_bound(cov);
        return py::make_tuple(h.chi_BE, h.nu1, h.nu2, h.nu3);
      },
      "cov_after"_a);
  m.def("secret_key_rate", &secret_key_rate, "spec"_a, "link"_a,
        "gain"_a = GainSpec{}, "options"_a = EvalOptions{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<OptBox>(m, "OptBox")
      .def(py::init<>())
      .def_readwrite("V_lo", &OptBox::V_lo)
      .def_readwrite("V_hi", &OptBox::V_hi)
      .def_readwrite("d_lo", &OptBox::d_lo)
      .def_readwrite("d_hi", &OptBox::d_hi)
      .def_readwrite("Ts_lo", &OptBox::Ts_lo)
      .def_readwrite("Ts_hi", &OptBox::Ts_hi);

  py::enum_<BoundarySide>(m, "BoundarySide")
      .value("INTERIOR", BoundarySide::Interior)
      .value("LOWER", BoundarySide::Lower)
      .value("UPPER", BoundarySide::Upper);

  py::class_<OptOptions>(m, "OptOptions")
      .def(py::init<>())
      .def_readwrite("threads", &OptOptions::threads)
      .def_readwrite("grid_V", &OptOptions::grid_V)
      .def_readwrite("grid_d", &OptOptions::grid_d)
      .def_readwrite("grid_Ts", &OptOptions::grid_Ts)
      .def_readwrite("nm_max_iter", &OptOptions::nm_max_iter)
      .def_readwrite("eval", &OptOptions::eval);

  py::class_<OptResult>(m, "OptResult")
      .def_readonly("best", &OptResult::best)
      .def_readonly("best_K", &OptResult::best_K)
      .def_readonly("evaluations", &OptResult::evaluations)
      .def_readonly("at_boundary", &OptResult::at_boundary)
      .def_readonly("no_positive_key", &OptResult::no_positive_key);
  m.def("optimize_key_rate", &optimize_key_rate, "family"_a, "link"_a,
        "box"_a = OptBox{}, "gain"_a = GainSpec{}, "options"_a = OptOptions{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<ScanPoint>(m, "ScanPoint")
      .def_readonly("V", &ScanPoint::V)
      .def_readonly("K", &ScanPoint::K);
  py::class_<ScanResult>(m, "ScanResult")
      .def_readonly("points", &ScanResult::points)
      .def_readonly("argmax_index", &ScanResult::argmax_index)
      .def_readonly("argmax_interior", &ScanResult::argmax_interior);
  m.def("scan_variance", &scan_variance, "family"_a, "link"_a, "V_grid"_a,
        "d"_a = 0.0, "Ts"_a = 0.0, "gain"_a = GainSpec{},
        "options"_a = OptOptions{}, py::call_guard<py::gil_scoped_release>());

  m.def("max_distance", &max_distance, "family"_a, "link"_a, "K_target"_a,
        "box"_a = OptBox{}, "gain"_a = GainSpec{}, "options"_a = OptOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("max_distance_fixed", &max_distance_fixed, "spec"_a, "link"_a,
        "K_target"_a, "gain"_a = GainSpec{}, "options"_a = OptOptions{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<FrontierPoint>(m, "FrontierPoint")
      .def_readonly("V", &FrontierPoint::V)
      .def_readonly("L_max", &FrontierPoint::L_max);
  m.def("frontier", &frontier, "family"_a, "V_grid"_a, "K_target"_a, "link"_a,
        "fixed_d"_a, "fixed_Ts"_a, "optimize_others"_a = false,
        "gain"_a = GainSpec{}, "options"_a = OptOptions{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<TracePoint>(m, "TracePoint")
      .def_readonly("L", &TracePoint::L)
      .def_readonly("best", &TracePoint::best)
      .def_readonly("K", &TracePoint::K);
  m.def("optimal_parameter_trace", &optimal_parameter_trace, "family"_a,
        "L_grid"_a, "link"_a, "box"_a = OptBox{}, "gain"_a = GainSpec{},
        "options"_a = OptOptions{}, py::call_guard<py::gil_scoped_release>());

  m.def("clear_source_cache", &clear_source_cache);
}
