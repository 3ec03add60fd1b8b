# Services 모듈
