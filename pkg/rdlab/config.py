# config.py
"""
Configuration for the reaction-diffusion laboratory.
Run configs (JSON) override these values per run; anything they omit falls back to here.
"""

# Structural condition search
CHECK_SETTINGS = {
    "u_max": 100.0,               # Upper corner of the sampled box [0, u_max]^m
    "lattice_points": 8,          # Log-spaced lattice points per axis (0 included)
    "lattice_floor": 1e-3,        # Smallest nonzero lattice coordinate, relative to u_max
    "search_budget": 10_000,      # Evaluations per check (lattice + random + hill climb)
    "hill_climb_steps": 100,      # Refinement steps from the worst sampled point
    "hill_climb_scale": 0.1,      # Relative perturbation size of one hill-climb step
    "tolerance": 1e-9,            # tol(u) = tolerance * (1 + |f(u)|_inf)
    "far_field_decades": 12,      # Radial probe radii u_max * 10^j, j = 0..decades
    "batch_size": 65_536,         # Points evaluated per vectorized batch
    "seed": 20180101,
}

# Time integration
SOLVER_SETTINGS = {
    "dt_init": 1e-3,
    "dt_min": 1e-10,
    "dt_max": 1e-2,
    "growth_factor": 1.25,        # dt *= growth_factor after growth_interval accepted steps
    "growth_interval": 10,
    "max_relative_change": 0.25,  # Reject a step changing the sup norm by more than this
    "negativity_factor": 1e-12,   # tol_neg = negativity_factor * current sup norm
    "snapshot_stride": 1.0 / 64,  # Diagnostics recording interval (time units)
}

# Proof harness
PROOF_SETTINGS = {
    "residual_constant": 4.0,     # C_disc in tol = C_disc * (dt^2 + h^2) * scale, see calibrate_residual_constant
    "step2_tolerance": 1e-6,      # Auxiliary-problem margins are accepted up to step2_tolerance * C1
    "nonnegativity_slack": 1e-12, # z_i >= -slack * max(1, sup w)
    "k_scales": (1.0, 0.25),      # K multipliers explored by the sensitivity scan
    "snapshot_stride": 1.0 / 512, # Denser than simulate: w is reconstructed linearly between snapshots
    "scan_amplitudes": (1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4),  # Amplitude scan of the K-scaled residual
    "scan_samples": 20000,
    "scan_seed": 0,
}

# Interpolation test family (versioned: changing anything here bumps family_version)
LEMMA2_SETTINGS = {
    "family_version": 1,
    "members": 20,
    "band_limit": 6,              # Highest cosine mode per axis in a family member
    "amplitudes": (1.0, 2.0, 4.0),
    "sweep_amplitudes": (1.0, 10.0, 100.0),
    "diffusivities": (0.1, 1.0, 10.0),
    "horizons": (0.1, 1.0),
    "snapshots_per_unit_time": 64,
    "min_snapshots": 16,
    "points": 64,
    "extent": 1.0,
    "shift_tolerance": 1e-8,
    "smoothing_times": (1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0),
    "seed": 7,
}

# Standard four-species benchmark
BENCHMARK = {
    "network": "four_species",
    "diffusivities": (1.0, 10.0, 0.1, 5.0),
    "points": 256,
    "extent": 1.0,
    "t_end": 1.0,
    "profile": "modes",
    "base": 0.5,
    "amplitude": 1.0,
    "width": 0.1,
}

# Output formats
OUTPUT_SETTINGS = {
    "float_format": "%.17g",
    "svg_width": 640,
    "svg_height": 360,
    "write_plots": True,
    "snapshot_format": "csv",     # "csv" or "npz"
}

# Parallel sweeps
SWEEP_SETTINGS = {
    "workers": 1,
}

# UI and display settings
UI_SETTINGS = {
    "colored_reports": True,      # Colorama colors in the end-of-command report
    "progress": True,             # tqdm progress bars for long loops
    "log_level": "INFO",
}
