#!/usr/bin/env python3
"""Regenerates the shipped scenario files under configs/."""
import copy
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parents[2] / "configs"


def gen(uid, mva, mw, h=5.0, droop=5.0):
    return {"id": uid, "rating_MVA": mva, "dispatch_MW": mw, "H_s": h, "droop_pct": droop}


def wind(uid, mva, mw):
    # DFIG units: no synchronous inertia, no governor.
    return gen(uid, mva, mw, h=0.0, droop=0.0)


def ibr(uid, mw, mva=50.0):
    return {"id": uid, "rating_MVA": mva, "dispatch_MW": mw, "p_min_MW": 0.0, "p_max_MW": mva,
            "participation": 1.0, "droop_pct": 5.0}


LAGS = {"T_R": 8.0, "F_H": 0.3}

THREE_AREA = {
    "schema_version": 1,
    "name": "scenario1",
    "description": "Three-area system, 60 MW load step at bus 8 in area2",
    "base_MVA": 100.0,
    "f_nominal_hz": 60.0,
    "period_s": 0.1,
    "areas": [
        {"id": "area1", "params": LAGS,
         "generators": [wind("WT1", 142.2, 72.24), wind("WT2", 142.2, 85.0), gen("G1", 192.0, 126.0)],
         "fleet": [ibr("IBR1", 25.0), ibr("IBR2", 15.0)]},
        {"id": "area2", "params": LAGS,
         "generators": [gen("G2", 247.5, 71.99), gen("G3", 192.0, 133.0), wind("WT3", 142.2, 85.0)],
         "fleet": [ibr("IBR3", 10.0), ibr("IBR4", 20.0)]},
        {"id": "area3", "params": LAGS,
         "generators": [gen("G4", 247.5, 72.24), gen("G5", 192.0, 128.0), wind("WT4", 142.2, 85.0)],
         "fleet": [ibr("IBR5", 30.0), ibr("IBR6", 5.0)]},
    ],
    "ties": [{"from": "area1", "to": "area2", "T": 0.5},
             {"from": "area2", "to": "area3", "T": 0.5},
             {"from": "area1", "to": "area3", "T": 0.5}],
    "collection": {"duration_s": 10.0, "amplitude_MW": 1.0, "frequency_Hz": 6.0, "noise_psd": 0.1,
                   "seed": 11, "measurement_noise": False},
    "controller": {"default": {"mode": "data_driven", "T_ini": 7, "epsilon": 0.1, "truncation_rank": 0}},
    "events": [{"kind": "step_load", "area": "area2", "bus": "bus8", "start_s": 2.0, "magnitude_MW": 60.0}],
    "delays": {"meas_ms": 300.0, "ctrl_ms": 300.0},
    "noise": {"freq_std_pu": 1e-6, "tie_std_pu": 2e-2},
    "support": {"enabled": True, "deadband_MW": 1.0},
    "metrics": {"band_hz": 0.01, "window_s": 1.0},
    "run": {"duration_s": 60.0, "seed": 1},
}


def variant(name, description, **changes):
    c = copy.deepcopy(THREE_AREA)
    c["name"] = name
    c["description"] = description
    for key, value in changes.items():
        c[key] = value
    return c


def five_area():
    def area(uid, h, rg, fleet, lags=()):
        return {"id": uid, "params": {"H": h, "R_g": rg, "T_R": 8.0, "F_H": 0.3, "extra_lags": list(lags)},
                "fleet": fleet}

    return {
        "schema_version": 1,
        "name": "scenario5",
        "description": "Five-area ring/mesh system at 25 ms, 450 MW load step at bus 33 in nyps",
        "base_MVA": 100.0,
        "f_nominal_hz": 60.0,
        "period_s": 0.025,
        "areas": [
            area("nets", 40.0, 0.005, [ibr("N1", 100.0, 200.0), ibr("N2", 100.0, 200.0)]),
            area("nyps", 25.0, 0.008, [ibr("Y1", 50.0, 200.0), ibr("Y2", 50.0, 200.0), ibr("Y3", 50.0, 200.0)]),
            area("area3", 8.0, 0.03, [ibr("A3a", 15.0), ibr("A3b", 15.0)]),
            area("area4", 6.0, 0.04, [ibr("A4a", 10.0), ibr("A4b", 20.0)]),
            area("area5", 5.0, 0.05, [ibr("A5a", 20.0), ibr("A5b", 10.0)]),
        ],
        "ties": [{"from": "nets", "to": "nyps", "T": 1.0},
                 {"from": "nyps", "to": "area3", "T": 0.5},
                 {"from": "area3", "to": "area4", "T": 0.5},
                 {"from": "area4", "to": "area5", "T": 0.5},
                 {"from": "area5", "to": "nets", "T": 0.5},
                 {"from": "nets", "to": "area3", "T": 0.5}],
        "collection": {"duration_s": 10.0, "amplitude_MW": 1.0, "frequency_Hz": 6.0, "noise_psd": 1.0,
                       "seed": 5, "measurement_noise": False},
        "controller": {
            "default": {"mode": "data_driven", "T_ini": 7, "epsilon": 0.1, "truncation_rank": 0},
            "per_area": {"nets": {"T_ini": 119, "epsilon": 0.3, "truncation_rank": 120}, "area4": {"T_ini": 7, "epsilon": 0.01}},
        },
        "events": [{"kind": "step_load", "area": "nyps", "bus": "bus33", "start_s": 2.0, "magnitude_MW": 450.0}],
        "delays": {"meas_ms": 300.0, "ctrl_ms": 300.0},
        "noise": {"freq_std_pu": 1e-6, "tie_std_pu": 2e-2},
        "support": {"enabled": True, "deadband_MW": 1.0},
        "metrics": {"band_hz": 0.01, "window_s": 1.0},
        "run": {"duration_s": 60.0, "seed": 1},
    }


def main():
    cfgs = {
        "scenario1": THREE_AREA,
        "scenario1_eps001": variant("scenario1_eps001", "Scenario 1 with epsilon = 0.01",
                                    controller={"default": {"mode": "data_driven", "T_ini": 7, "epsilon": 0.01,
                                                            "truncation_rank": 0}}),
        "scenario1_off": variant("scenario1_off", "Scenario 1 with supplementary control disabled (droop only)",
                                 controller={"default": {"mode": "off"}}),
        "scenario1_model": variant("scenario1_model", "Scenario 1 with the model-based estimator",
                                   controller={"default": {"mode": "model_based", "epsilon": 0.1}}),
        "scenario1b": variant("scenario1b", "130 MW load step at bus 8 in area2, beyond local IBR headroom",
                              events=[{"kind": "step_load", "area": "area2", "bus": "bus8", "start_s": 2.0,
                                       "magnitude_MW": 130.0}]),
        "scenario3": variant("scenario3", "Trip of generator G2 (71.99 MW) in area2",
                             events=[{"kind": "generator_trip", "area": "area2", "unit": "G2", "start_s": 2.0}]),
    }
    s2 = variant("scenario2", "Renewable area3: 40 MW step at bus 14 plus a rate-limited wind drop at bus 17",
                 events=[{"kind": "step_load", "area": "area3", "bus": "bus14", "start_s": 2.0, "magnitude_MW": 40.0},
                         {"kind": "ramp", "area": "area3", "bus": "bus17", "start_s": 2.0, "magnitude_MW": 20.0,
                          "ramp_rate_MW_per_s": 1.0}])
    # G4 and G5 become non-dispatchable IBRs; a synchronous condenser keeps some inertia.
    s2["areas"][2]["generators"] = [wind("G4", 247.5, 72.24), wind("G5", 192.0, 128.0), wind("WT4", 142.2, 85.0)]
    s2["areas"][2]["params"] = {"H": 1.5, "R_g": 1000.0, "T_R": 8.0, "F_H": 0.3}
    cfgs["scenario2"] = s2
    cfgs["scenario5"] = five_area()
    for name, cfg in cfgs.items():
        (OUT / f"{name}.json").write_text(json.dumps(cfg, indent=2) + "\n")


if __name__ == "__main__":
    main()
