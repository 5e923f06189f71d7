"""
Compiler and verifier services: Hadamard construction, sign matrices,
pulse generation, verification and order/prime analysis.
"""
