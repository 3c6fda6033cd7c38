# Stego-Hawk - Source Package
