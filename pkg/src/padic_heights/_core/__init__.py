"""Hot convolution kernel with a compiled and a pure-Python implementation."""
