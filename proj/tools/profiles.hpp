#pragma once

// Built-in experiment profiles for the `power` subcommand. The desk profile
// covers p in {100, 500} with 100 replications; the full profile adds
// p in {1000, 2000} and is meant for long unattended runs. The expect
// entries are the reference power table; deviations beyond the listed
// tolerance are written to flags.txt and flip the exit code to 3.

namespace sss_cli {

inline const char* kDeskProfile = R"cfg(
# Desk-scale power study: models I-IV, type (i) and (ii) covariances.
models = [I, II, III, IV]
dims = [100, 500]
covs = [ar0, ar0.3, ar0.5, ar0.8, eq0.2]
n = 1000
replications = 100
level = 0.05
h_slices = 10
k = 1
calibration = pooled
methods = [SSS, HC]
mode = sdp
master_seed = 013001
sdp_tolerance = 1e-5
sdp_max_iterations = 1500

# Reference cells (model,dim,cov,method,power,tolerance)
expect = ["I,100,ar0,SSS,1.00,0.10", "I,100,ar0,HC,0.16,0.12", "I,100,ar0.3,SSS,1.00,0.10", "I,100,ar0.3,HC,0.29,0.12", "I,100,ar0.5,SSS,0.99,0.10", "I,100,ar0.5,HC,0.54,0.12", "I,100,ar0.8,SSS,1.00,0.10", "I,100,ar0.8,HC,0.93,0.12", "I,100,eq0.2,SSS,0.90,0.10", "I,100,eq0.2,HC,0.35,0.12", "I,500,ar0,SSS,0.98,0.10", "I,500,ar0,HC,0.16,0.12", "I,500,ar0.3,SSS,0.99,0.10", "I,500,ar0.3,HC,0.18,0.12", "I,500,ar0.5,SSS,0.97,0.10", "I,500,ar0.5,HC,0.34,0.12", "I,500,ar0.8,SSS,0.98,0.10", "I,500,ar0.8,HC,0.71,0.12", "I,500,eq0.2,SSS,0.52,0.10", "I,500,eq0.2,HC,0.25,0.12", "II,100,ar0,SSS,0.98,0.10", "II,100,ar0,HC,0.12,0.12", "II,100,ar0.3,SSS,0.97,0.10", "II,100,ar0.3,HC,0.16,0.12", "II,100,ar0.5,SSS,0.96,0.10", "II,100,ar0.5,HC,0.24,0.12", "II,100,ar0.8,SSS,1.00,0.10", "II,100,ar0.8,HC,0.37,0.12", "II,100,eq0.2,SSS,0.96,0.10", "II,100,eq0.2,HC,0.56,0.12", "II,500,ar0,SSS,0.87,0.10", "II,500,ar0,HC,0.06,0.12", "II,500,ar0.3,SSS,0.80,0.10", "II,500,ar0.3,HC,0.09,0.12", "II,500,ar0.5,SSS,0.82,0.10", "II,500,ar0.5,HC,0.13,0.12", "II,500,ar0.8,SSS,0.83,0.10", "II,500,ar0.8,HC,0.14,0.12", "II,500,eq0.2,SSS,0.77,0.10", "II,500,eq0.2,HC,0.32,0.12", "III,100,ar0,SSS,1.00,0.10", "III,100,ar0,HC,0.21,0.12", "III,100,ar0.3,SSS,1.00,0.10", "III,100,ar0.3,HC,0.25,0.12", "III,100,ar0.5,SSS,1.00,0.10", "III,100,ar0.5,HC,0.63,0.12", "III,100,ar0.8,SSS,1.00,0.10", "III,100,ar0.8,HC,1.00,0.12", "III,100,eq0.2,SSS,0.98,0.10", "III,100,eq0.2,HC,0.78,0.12", "III,500,ar0,SSS,0.99,0.10", "III,500,ar0,HC,0.11,0.12", "III,500,ar0.3,SSS,1.00,0.10", "III,500,ar0.3,HC,0.12,0.12", "III,500,ar0.5,SSS,0.98,0.10", "III,500,ar0.5,HC,0.11,0.12", "III,500,ar0.8,SSS,0.99,0.10", "III,500,ar0.8,HC,0.22,0.12", "III,500,eq0.2,SSS,0.62,0.10", "III,500,eq0.2,HC,0.72,0.12", "IV,100,ar0,SSS,0.89,0.10", "IV,100,ar0,HC,0.01,0.12", "IV,100,ar0.3,SSS,0.91,0.10", "IV,100,ar0.3,HC,0.03,0.12", "IV,100,ar0.5,SSS,0.89,0.10", "IV,100,ar0.5,HC,0.04,0.12", "IV,100,ar0.8,SSS,1.00,0.10", "IV,100,ar0.8,HC,0.10,0.12", "IV,100,eq0.2,SSS,0.94,0.10", "IV,100,eq0.2,HC,0.07,0.12", "IV,500,ar0,SSS,0.70,0.10", "IV,500,ar0,HC,0.03,0.12", "IV,500,ar0.3,SSS,0.57,0.10", "IV,500,ar0.3,HC,0.04,0.12", "IV,500,ar0.5,SSS,0.57,0.10", "IV,500,ar0.5,HC,0.07,0.12", "IV,500,ar0.8,SSS,0.69,0.10", "IV,500,ar0.8,HC,0.09,0.12", "IV,500,eq0.2,SSS,0.45,0.10", "IV,500,eq0.2,HC,0.08,0.12"]
)cfg";

inline const char* kFullProfile = R"cfg(
# Full-scale power study (hours of compute at p = 2000).
models = [I, II, III, IV]
dims = [100, 500, 1000, 2000]
covs = [ar0, ar0.3, ar0.5, ar0.8, eq0.2]
n = 1000
replications = 100
level = 0.05
h_slices = 10
k = 1
calibration = pooled
methods = [SSS, HC]
mode = sdp
master_seed = 013001
sdp_tolerance = 1e-5
sdp_max_iterations = 2000
)cfg";

inline const char* kPhaseProfile = R"cfg(
# Power phase transition: model VI kappa sweep at n = p = 1000.
models = [VI]
dims = [1000]
covs = [ar0.3]
sweep_kappa = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10]
n = 1000
replications = 50
level = 0.05
h_slices = 10
k = 1
calibration = pooled
methods = [SSS, HC]
mode = sdp
master_seed = 013003
sdp_tolerance = 1e-5
sdp_max_iterations = 1500
)cfg";

}  // namespace sss_cli
