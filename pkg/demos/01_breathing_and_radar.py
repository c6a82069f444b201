"""Chest displacement and its two sensor views.

Builds one subject's breathing motion, observes it with a Doppler radar
channel (quadrature pair) and a respiratory belt, and shows that arctangent
demodulation recovers the motion from the radar to sub-micrometer accuracy.
"""

import numpy as np

from sienna.breathing import (
    SubjectProfile,
    arctan_demodulate,
    belt_observe,
    linear_demodulate,
    radar_observe,
    synth_displacement,
)

profile = SubjectProfile(
    resp_rate=12.0,  # breaths per minute
    resp_amp=0.45,  # cm of chest travel
    inhale_fraction=0.35,  # inhales are faster than exhales
    heart_rate=58.0,
    heart_amp=0.03,
    drift_std=0.01,
    seed=7,
)

x = synth_displacement(profile, t_start=0.0, t_end=60.0, rate=50.0)
print(f"displacement: {x.samples.size} samples over {x.t_end - x.t_start:.0f} s")
print(f"  peak-to-peak {x.samples.max() - x.samples.min():.3f} cm")

# Doppler radar at 28 GHz: 0.45 cm of motion sweeps several radians of phase
iq = radar_observe(x, wavelength=1.07, theta0=0.8, a_i=1.2, a_q=0.9)
phase_span = 4 * np.pi * (x.samples.max() - x.samples.min()) / 1.07
print(f"radar phase excursion: {phase_span:.2f} rad")

recovered = arctan_demodulate(iq)
err = recovered.samples - (x.samples - x.samples.mean())
print(f"arctangent demodulation max error: {np.abs(err).max():.2e} cm")

# The belt sees the same motion through a linear transducer at 100 Hz
belt = belt_observe(x, gain=1.8, noise_std=0.002, sample_rate=100.0, seed=3)
rho = np.corrcoef(np.interp(x.times, belt.times, belt.samples), x.samples)[0, 1]
print(f"belt/truth correlation at gain 1.8 with noise: {rho:.4f}")

# For small motions the principal-axis projection of (I, Q) is linear in x
gentle = synth_displacement(
    SubjectProfile(resp_amp=0.01, heart_amp=0.001, seed=7), 0.0, 60.0, 50.0
)
proxy = linear_demodulate(radar_observe(gentle, theta0=0.4))
rho_lin = abs(np.corrcoef(proxy, gentle.samples)[0, 1])
print(f"linear (eigenvector) demodulation correlation on a small arc: {rho_lin:.5f}")
