'use strict';

const util_b = require('./util_b');

exports.setup = util_b.buy;
exports.version = '1.4.2';
