#pragma once

#define TORIC_VERSION "0.1.0"
