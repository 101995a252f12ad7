"""
acoustic-psnr

Evaluates acoustic call detectors by their detection probability as a
function of signal-to-noise ratio, p(snr): controlled call/noise mixing,
a fixed small CNN detector and an energy reference detector, maximum
likelihood logistic fits with bootstrap intervals, SNR-targeted training
augmentation, and a spherical-spreading detection-area model.

Sub-packages:
- dsp: audio I/O, resampling, band levels, log-mel front end
- mixing: SNR-controlled mixing and evaluation grids
- detector: CNN detector, training, energy detector
- psychometric: p(snr) measurement, fitting and metrics
- area: detection radius and area against noise level
- corpus: synthetic calls/noises, analytic stimuli, datasets, trainAugm
- evaluation: confusion-matrix metrics
- reporting: JSON/CSV exports, SVG plots, Markdown report
- config: settings, logging and run configs
- cli: the acoustic-psnr command
"""

__version__ = "0.1.0"
