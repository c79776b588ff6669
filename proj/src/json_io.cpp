namespace flagsym {}
