"""eis-kit: quantitative pipeline for a sweat-based impedance-spectroscopy
glucose platform.

Modules: equivalent circuits (:mod:`.circuit`), the ratiometric single-bin
DFT analyzer (:mod:`.dft`), the four-term noise model (:mod:`.noise`),
error/performance metrology (:mod:`.metrology`), dose-response analytics
(:mod:`.dose`), the regression-ARIMA engine (:mod:`.regarima`), cohort
synthesis (:mod:`.synth`) and the command-line surface (:mod:`.cli`).
"""

__version__ = "0.1.0"
