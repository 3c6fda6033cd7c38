# Stego-Hawk test suite
