# Configuration Package