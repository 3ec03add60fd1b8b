# Schemas 모듈
