"""
Configuración de Django para viscospectral
Espectros y soluciones en serie de ecuaciones integro-diferenciales con memoria exponencial
"""

from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Herramienta de línea de comandos sin servidor web: la clave solo satisface a Django
SECRET_KEY = "viscospectral-cli-sin-servidor"

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Apps del proyecto
    "viscospectral",
]

# Sin base de datos: todos los cálculos son en memoria
DATABASES = {}

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Configuración específica de viscospectral
# ===============================================
# Valores por defecto de la CLI. Ningún valor se lee de variables de entorno:
# cada corrida queda determinada por su archivo JSON de configuración.

VISCOSPECTRAL_CONFIG = {
    # Malla de λ para lemma_bound_scan (101×101)
    'MALLA_LAMBDA_PUNTOS': 101,
    'MALLA_LAMBDA_RE_MAX': 1.0e3,
    'MALLA_LAMBDA_IM_MAX': 1.0e3,
    # Búsqueda del umbral de contracción
    'GAMMA_MAX_CONTRACCION': 1.0e3,
    # Oráculo de Volterra
    'DT_ORACULO': 1.0e-4,
    'HORIZONTE': 5.0,
    # Malla temporal de trazas y normas
    'PUNTOS_TRAZA': 501,
    'PUNTOS_NORMA': 4001,
    'PUNTOS_X': 65,
    # Comparación serie vs oráculo
    'TOLERANCIA_COMPARACION': 1.0e-6,
    # Constante empírica d
    'PROBLEMAS_ALEATORIOS': 50,
    'SEMILLA': 20240611,
    # Escalera de a_n para los ajustes asintóticos
    'ESCALERA_A': (8, 16, 32, 64, 128),
}

# Configuración de logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'INFO',
            'class': 'logging.FileHandler',
            'filename': BASE_DIR / 'viscospectral.log',
            'formatter': 'verbose',
        },
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'viscospectral': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}
