"""
viscospectral: ecuaciones de Volterra hiperbólicas con núcleos de Prony
"""
